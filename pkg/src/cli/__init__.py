"""
Command-line front end for coherent-flow.

Exports:
    - main: Entry point
    - build_parser: argparse parser
    - cmd_*: Individual commands
"""

from src.cli.app import build_parser, main
from src.cli.commands import cmd_emulate, cmd_fit, cmd_report, cmd_sweep, cmd_synthesize

__all__ = [
    "main",
    "build_parser",
    "cmd_sweep",
    "cmd_synthesize",
    "cmd_fit",
    "cmd_report",
    "cmd_emulate",
]

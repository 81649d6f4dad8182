"""
Argument parsing and dispatch for the coherent-flow command line.
"""

import argparse
from pathlib import Path

from config import get_settings
from config.logging import setup_logging
from src import __version__
from src.cli.commands import cmd_emulate, cmd_fit, cmd_report, cmd_sweep, cmd_synthesize
from src.models.emulation import Scenario

DESCRIPTION = """\
Coherent-feedback disturbance rejection for optical ring resonators.

Commands write CSV traces and JSON results into --out together with a
<command>_manifest.json. Exit codes: 0 success, 2 invalid input,
3 numerical failure.
"""


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per operation."""
    settings = get_settings()

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--out",
        type=Path,
        default=settings.output_dir,
        metavar="DIR",
        help=f"output directory (default: {settings.output_dir})",
    )
    common.add_argument(
        "--log-level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="override COHERENT_FLOW_LOG_LEVEL",
    )

    configured = argparse.ArgumentParser(add_help=False)
    configured.add_argument(
        "--config", type=Path, required=True, metavar="PATH", help="run config (JSON)"
    )
    configured.add_argument("--grid-min", type=float, default=None, metavar="MHZ")
    configured.add_argument("--grid-max", type=float, default=None, metavar="MHZ")
    configured.add_argument("--grid-points", type=int, default=None, metavar="N")

    parser = argparse.ArgumentParser(
        prog="coherent-flow",
        description=DESCRIPTION,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sweep = commands.add_parser(
        "sweep",
        parents=[common, configured],
        help="frequency sweep: open, closed and ratio traces, phase scan",
    )
    sweep.set_defaults(handler=cmd_sweep)

    synthesize = commands.add_parser(
        "synthesize", parents=[common, configured], help="optimize compensator gain and phase"
    )
    synthesize.add_argument(
        "--band", type=float, default=None, metavar="EDGE", help="band edge in MHz"
    )
    synthesize.set_defaults(handler=cmd_synthesize)

    fit = commands.add_parser("fit", parents=[common], help="fit a parametric dataset")
    fit.add_argument("--data", type=Path, required=True, metavar="CSV")
    fit.add_argument(
        "--bounds", type=Path, required=True, metavar="PATH", help="gamma_p, bounds (JSON)"
    )
    fit.set_defaults(handler=cmd_fit)

    report = commands.add_parser(
        "report", parents=[common], help="check a fit against measurements"
    )
    report.add_argument("--fit", type=Path, required=True, metavar="PATH")
    report.add_argument("--measured", type=Path, required=True, metavar="PATH")
    report.set_defaults(handler=cmd_report)

    emulate = commands.add_parser(
        "emulate", parents=[common, configured], help="emulate a measurement"
    )
    emulate.add_argument(
        "--scenario",
        required=True,
        type=str.lower,
        choices=[s.value for s in Scenario],
        metavar="NAME",
        help=f"one of {', '.join(s.value for s in Scenario)}",
    )
    emulate.add_argument("--seed", type=int, default=None, metavar="N")
    emulate.set_defaults(handler=cmd_emulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    """Parse arguments, configure logging and run one command."""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level or get_settings().log_level)
    return args.handler(args)

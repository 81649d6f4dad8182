#!/usr/bin/env python3
"""
coherent-flow - coherent-feedback disturbance rejection

Entry point for the command-line front end.
"""

import sys


def main(argv: list[str] | None = None) -> int:
    """Main entry point."""
    from src.cli import main as run

    return run(argv)


if __name__ == "__main__":
    sys.exit(main())

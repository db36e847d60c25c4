"""
ChiPredict - Command-line entry point.
"""

import argparse
import dataclasses
import logging
import sys
from typing import List, Optional

from chipredict import __version__, register_commands, setup_logging
from chipredict.commands.common import flag_name
from chipredict.config import load_config
from chipredict.errors import DomainError, NumericalError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", default=None, help="flat JSON file with flag defaults and settings")
    parent.add_argument("--tol", type=float, default=None, help="relative quadrature tolerance")
    parent.add_argument("--seed", type=int, default=None, help="random seed")
    parent.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")

    parser = argparse.ArgumentParser(
        prog="chipredict",
        description="Predictive densities, dominance checks and KL risks for a chi-squared observable.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_commands(subparsers, parent)
    return parser


def apply_file_defaults(args: argparse.Namespace, defaults: dict):
    """Fill flags left unset on the command line from the --config file."""
    for name, value in defaults.items():
        if hasattr(args, name) and getattr(args, name) is None:
            setattr(args, name, value)
        elif not hasattr(args, name):
            logger.debug(f"--config key '{name}' does not apply to '{args.command}'")


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for ChiPredict."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_VALIDATION

    try:
        config, defaults = load_config(args.config)
        apply_file_defaults(args, defaults)
        if args.tol is not None:
            config = dataclasses.replace(config, QUAD_REL_TOL=args.tol)
    except ValueError as e:
        print(f"chipredict: error: {e}", file=sys.stderr)
        return EXIT_VALIDATION

    setup_logging(config, args.verbose)
    if args.config:
        logger.info(f"Loaded settings from {args.config}")
    logger.debug(f"Running '{args.command}' with settings {config.to_public_dict()}")

    try:
        return args.handler(args, config)
    except DomainError as e:
        flag = flag_name(e.field)
        prefix = f"{flag}: " if flag else ""
        print(f"chipredict {args.command}: error: {prefix}{e}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as e:
        print(f"chipredict {args.command}: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as e:
        print(f"chipredict {args.command}: error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"chipredict {args.command}: I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

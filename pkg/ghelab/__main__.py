"""Entry point for running ghelab as a module.

Usage:
    python -m ghelab check                        # structure checks
    python -m ghelab simulate --model nsf -c config.yaml
    python -m ghelab converge --epsilon 0.08,0.04,0.02,0.01
    python -m ghelab --help
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import yaml
from pydantic import ValidationError

from . import __version__
from .app import COMMANDS, EXIT_CONFIG, Laboratory
from .config import apply_overrides, create_default_config, get_config, print_env_help


def parse_epsilons(text: str) -> List[float]:
    """Parse "X[,X...]" into a list of positive floats."""
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid epsilon list: {text!r}") from None
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError(f"epsilon values must be positive: {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-c", "--config",
        default=None,
        help="Path to YAML configuration file (optional)",
    )
    common.add_argument("--out", default=None, help="Output directory")
    common.add_argument("--seed", type=int, default=None, help="Base random seed")
    common.add_argument("--threads", type=int, default=None, help="Worker threads")
    common.add_argument(
        "--epsilon",
        type=parse_epsilons,
        default=None,
        help="Relaxation time(s): one value for simulate, a list for the sweeps",
    )
    common.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=None,
        help="Logging level",
    )

    parser = argparse.ArgumentParser(
        prog="ghelab",
        description="Numerical laboratory for generalized hydrodynamics and its "
                    "Navier-Stokes-Fourier limit",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  ghelab check --out out/check
  ghelab simulate --model ghe --epsilon 0.05 -c config.yaml
  ghelab converge -c config.yaml --threads 4
  ghelab --generate-config > config.yaml

Exit codes: 0 pass, 1 experiment failed, 2 usage or config error, 3 numerical abort.
        """,
    )
    parser.add_argument(
        "-v", "--version",
        action="version",
        version=f"%(prog)s {__version__}",
    )
    parser.add_argument(
        "--generate-config",
        action="store_true",
        help="Print default configuration and exit",
    )
    parser.add_argument(
        "--env-help",
        action="store_true",
        help="Print environment variable help and exit",
    )

    sub = parser.add_subparsers(dest="command")
    sub.add_parser("check", parents=[common], help="Run the structure checks")
    simulate = sub.add_parser("simulate", parents=[common], help="Run one simulation")
    simulate.add_argument(
        "--model",
        choices=["ghe", "nsf"],
        default="ghe",
        help="Generalized system or Navier-Stokes-Fourier reference",
    )
    sub.add_parser("converge", parents=[common], help="Relaxation-limit convergence sweep")
    sub.add_parser("maxwell", parents=[common], help="Maxwell-iteration defect sweep")
    sub.add_parser("residual", parents=[common], help="Residual orders of the prepared data")
    return parser


def overrides_from_args(args: argparse.Namespace) -> dict:
    """Dotted-key overrides for the flags that were given."""
    overrides = {
        "output.directory": args.out,
        "seed": args.seed,
        "threads": args.threads,
        "logging.level": args.log_level,
    }
    if args.epsilon is not None:
        if args.command == "simulate":
            if len(args.epsilon) != 1:
                raise ValueError("simulate takes a single --epsilon value")
            overrides["model.epsilon"] = args.epsilon[0]
        else:
            overrides["experiment.epsilons"] = args.epsilon
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point.

    Returns:
        Exit code (0 pass, 1 fail, 2 config error, 3 numerical abort)
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    # Handle --generate-config
    if args.generate_config:
        print(create_default_config())
        return 0

    # Handle --env-help
    if args.env_help:
        print(print_env_help())
        return 0

    if args.command not in COMMANDS:
        parser.print_help()
        return EXIT_CONFIG

    try:
        config = apply_overrides(get_config(args.config), overrides_from_args(args))
        raw_text = Path(args.config).read_text() if args.config else None
    except FileNotFoundError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValidationError, ValueError, yaml.YAMLError) as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    lab = Laboratory(config, raw_text=raw_text)
    try:
        return lab.run(args.command, model=getattr(args, "model", "ghe"))
    except KeyboardInterrupt:
        print("\nInterrupted by user")
        return 1


if __name__ == "__main__":
    sys.exit(main())

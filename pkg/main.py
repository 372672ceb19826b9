#!/usr/bin/env python3
"""
Tempered Stable Toolkit - command-line entry point.

Validates Rosinski-measure parameter files and computes Levy tails, cumulants,
parameter transforms, Monte Carlo samples and domain of attraction reports.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

# Add the project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from logging_config import get_logger, set_console_level

log = get_logger(__name__)

from engine.config import ConfigError, ConfigManager
from engine.errors import ParamsFileError, TemperedStableError
from services.commands import COMMANDS
from utils.constants import EXIT_FAILURE, EXIT_PARSE
from utils.paths import init_app_paths


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tstoolkit", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--config", help="YAML config file (defaults to the per-user config)")
    parser.add_argument("--log-level", default=None, help="stderr log level (DEBUG, INFO, WARNING, ...)")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_io(name: str, help_text: str, output_required: bool = False) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", required=True, help="params file (YAML)")
        p.add_argument("--output", required=output_required, help="output file (stdout when omitted)")
        return p

    with_io("validate", "check the Levy measure conditions")

    p = with_io("cumulants", "cumulant table up to --max-order")
    p.add_argument("--max-order", type=int, default=4)
    p.add_argument("--check-cf", action="store_true", help="add finite-difference cumulants of the exponent")

    p = with_io("tail", "CSV of r and M_D(r)")
    p.add_argument("--grid", help="min:max:count(log|lin)")
    p.add_argument("--cone", help="comma-separated ray indices (default: all rays)")

    p = with_io("transform", "rewrite the parameters with a smaller alpha or a larger p", output_required=True)
    p.add_argument("--kind", choices=["lower-alpha", "raise-p"], required=True)
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--grid-export", type=int, default=None, help="tabulate profiles on this many nodes")

    p = with_io("diff", "compare the Levy tails of two params files")
    p.add_argument("--other", required=True, help="second params file")
    p.add_argument("--grid", help="min:max:count(log|lin)")
    p.add_argument("--tol", type=float, default=1e-6)

    p = with_io("cf", "characteristic exponent along one coordinate axis")
    p.add_argument("--grid", help="min:max:count(log|lin); pass negative bounds as --grid=-10:10:41lin")
    p.add_argument("--axis", type=int, default=0)

    p = with_io("simulate", "draw samples into a TSBATCH1 file", output_required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--small-jump", choices=["gaussian-completion", "drift-only"], default=None)

    p = with_io("hill", "Hill tail-index estimates from a TSBATCH1 file")
    p.add_argument("--k", type=int, default=None, help="order statistics used (default: config fraction of n)")

    p = with_io("doa", "CF distance of normalised sums to the stable limit")
    p.add_argument("--n-values", default="100,1000,10000")
    p.add_argument("--m", type=int, default=200, help="replicas per n")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code else 0

    try:
        init_app_paths()
        cm = ConfigManager(config_path=args.config)
        cm.load_config()
        errors = cm.validate_config()
        if errors:
            raise ConfigError("; ".join(errors))
        set_console_level(args.log_level or cm.get("logging.level", "INFO"))
        log.debug("Running %s with %s", args.command, vars(args))
        return COMMANDS[args.command](args, cm)
    except (ParamsFileError, ConfigError) as e:
        log.error("%s: %s", args.command, e)
        return EXIT_PARSE
    except TemperedStableError as e:
        log.error("%s failed: %s", args.command, e)
        return EXIT_FAILURE
    except ValueError as e:
        # malformed flag values such as --grid
        log.error("%s: %s", args.command, e)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())

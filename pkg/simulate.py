"""Command line entry point for the attitude tracking simulator.

命令行入口，提供单次运行与批量运行两个子命令。

Usage examples::

    python simulate.py run --config data/tracking_asy_geo.toml --csv out.csv --report out.txt
    python simulate.py run --config data/tracking_ftt_geo.toml --csv out.csv --report out.txt --plot out.svg
    python simulate.py batch --config data/tracking_ftt_fro.toml --runs 100 --seed-base 0 --out-dir runs/

Exit codes: 0 success, 1 run failure, 2 configuration error,
3 singularity abort, 4 output error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from attitude_core.config import SimConfig, parse_config, with_overrides
from attitude_core.constants import (
    CONTROLLER_TAGS,
    DEFAULT_CONFIG_PATH,
    DEFAULT_MAX_WORKERS,
    EXIT_CONFIG_ERROR,
    EXIT_IO_ERROR,
    LOG_LEVEL,
)
from attitude_core.errors import ParseError, ValidationError
from attitude_core.logger_utils import configure_logging, format_run_details, log_details
from services.batch_service import batch
from services.run_service import run

logger = logging.getLogger("simulate")


def _add_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=DEFAULT_CONFIG_PATH, help="path to the configuration file")
    parser.add_argument("--controller", choices=CONTROLLER_TAGS, help="override the control law")
    parser.add_argument("--seed", type=int, help="override init.seed")
    parser.add_argument("--t-final", dest="t_final", type=float, help="override t_final (s)")
    parser.add_argument("--dt", type=float, help="override integrator.h (s)")
    parser.add_argument("--log-level", default=LOG_LEVEL, help="logging level, e.g. DEBUG or INFO")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Attitude tracking simulator on SO(3)")
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run one simulation")
    _add_overrides(run_parser)
    run_parser.add_argument("--csv", help="trajectory CSV path (default: output.csv in config)")
    run_parser.add_argument("--report", help="report path (default: output.report in config)")
    run_parser.add_argument("--plot", help="optional SVG plot path")

    batch_parser = sub.add_parser("batch", help="run a seeded batch")
    _add_overrides(batch_parser)
    batch_parser.add_argument("--runs", type=int, required=True, help="number of runs")
    batch_parser.add_argument("--seed-base", dest="seed_base", type=int, default=0, help="first seed")
    batch_parser.add_argument("--out-dir", dest="out_dir", required=True, help="output directory")
    batch_parser.add_argument(
        "--max-workers",
        dest="max_workers",
        type=int,
        default=DEFAULT_MAX_WORKERS,
        help="concurrent runs",
    )
    return parser


def load(args: argparse.Namespace) -> SimConfig:
    """Parse the config file and apply command line overrides."""
    config = parse_config(args.config)
    return with_overrides(
        config,
        controller=args.controller,
        seed=args.seed,
        t_final=args.t_final,
        dt=args.dt,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and dispatch to the selected sub-command."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level.upper())

    try:
        config = load(args)
    except (ParseError, ValidationError) as exc:
        logger.error("Invalid configuration: %s", exc)
        return EXIT_CONFIG_ERROR
    except OSError as exc:
        logger.error("Cannot read configuration: %s", exc)
        return EXIT_CONFIG_ERROR

    log_details(logger, f"Loaded {args.config}", format_run_details(config))

    if args.command == "run":
        csv_path = args.csv or config.output.csv
        report_path = args.report or config.output.report
        plot_path = args.plot or config.output.plot
        if not csv_path or not report_path:
            logger.error("Both --csv and --report are required (or output.csv / output.report in the config)")
            return EXIT_CONFIG_ERROR
        return run(config, csv_path, report_path, plot_path)

    if args.runs < 1:
        logger.error("--runs must be >= 1, got %s", args.runs)
        return EXIT_CONFIG_ERROR
    if args.max_workers < 1 or args.seed_base < 0:
        logger.error("--max-workers must be >= 1 and --seed-base >= 0")
        return EXIT_CONFIG_ERROR
    try:
        summary = batch(config, args.runs, args.seed_base, args.out_dir, max_workers=args.max_workers)
    except OSError as exc:
        logger.error("Cannot write batch outputs: %s", exc)
        return EXIT_IO_ERROR
    return summary.exit_code


if __name__ == "__main__":
    sys.exit(main())

"""Command line demo for the attitude tracking simulator.

命令行演示脚本：对四种控制律运行同一组随机初值与无界参考信号，
并为每种控制律写出轨迹 CSV、收敛报告和 SVG 图。

Usage examples::

    python scripts/demo.py --out-dir demo_output
    python scripts/demo.py --out-dir demo_output --seed 3 --t-final 6 --controllers ftt_geo ftt_fro
"""

import argparse
import logging
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from attitude_core.config import parse_config, with_overrides  # noqa: E402
from attitude_core.constants import CONTROLLER_TAGS, DEFAULT_CONFIG_PATH, EXIT_OK  # noqa: E402
from attitude_core.logger_utils import configure_logging  # noqa: E402
from services.run_service import RunService  # noqa: E402

logger = logging.getLogger("demo")


def main() -> int:
    """Run every requested control law and print a short table.

    依次运行所选控制律并打印汇总。
    """
    parser = argparse.ArgumentParser(description="Demo for the attitude tracking simulator")
    parser.add_argument("--out-dir", default="demo_output", help="directory for CSV, report and plot files")
    parser.add_argument("--seed", type=int, default=7, help="random initialisation seed")
    parser.add_argument("--t-final", type=float, default=10.0, help="simulated time in seconds")
    parser.add_argument("--controllers", nargs="+", choices=CONTROLLER_TAGS, default=list(CONTROLLER_TAGS))
    parser.add_argument("--log-file", help="also write the log to this file")
    args = parser.parse_args()

    configure_logging(log_file=args.log_file)
    os.makedirs(args.out_dir, exist_ok=True)
    base = parse_config(DEFAULT_CONFIG_PATH)
    service = RunService()

    print(f"{'controller':<10} {'theta0':>10} {'conv. time':>12} {'predicted':>10} {'rate':>10}")
    status = EXIT_OK
    for tag in args.controllers:
        config = with_overrides(base, controller=tag, seed=args.seed, t_final=args.t_final)
        stem = os.path.join(args.out_dir, tag)
        result = service.execute(config, f"{stem}.csv", f"{stem}.txt", f"{stem}.svg")
        if not result.ok or result.report is None:
            logger.error("%s failed: %s", tag, result.error)
            status = result.exit_code
            continue
        report = result.report
        conv = "none" if report.convergence_time is None else f"{report.convergence_time:.3f}"
        pred = "n/a" if report.predicted_time is None else f"{report.predicted_time:.3f}"
        rate = "none" if report.fitted_rate is None else f"{report.fitted_rate:.3f}"
        print(f"{tag:<10} {report.theta0:>10.4f} {conv:>12} {pred:>10} {rate:>10}")
    return status


if __name__ == "__main__":
    sys.exit(main())

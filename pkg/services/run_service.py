"""Single-run orchestration: simulate, analyse, write outputs."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from attitude_core.analysis import ConvergenceReport, analyze_trajectory
from attitude_core.config import SimConfig
from attitude_core.constants import EXIT_FAILURE, EXIT_IO_ERROR, EXIT_OK, EXIT_SINGULARITY, LOG_LEVEL
from attitude_core.errors import SingularityError, StepError
from attitude_core.integrator import TrajectoryRecord, simulate
from attitude_core.logger_utils import format_run_details, log_details
from attitude_core.so3 import relative_rotation, rotation_angle

from .plot_service import PlotService
from .trajectory_service import TrajectoryService, write_all_atomic

logger = logging.getLogger(__name__)
logger.setLevel(LOG_LEVEL)


@dataclass
class RunResult:
    """Outcome of one run.

    单次运行结果：退出码、报告（失败时为 ``None``）与错误信息。
    """

    exit_code: int
    theta0: float
    report: Optional[ConvergenceReport] = None
    records: Optional[list[TrajectoryRecord]] = None
    error: Optional[str] = None
    singularity_hit: bool = False

    @property
    def ok(self) -> bool:
        return self.exit_code == EXIT_OK


def initial_angle(config: SimConfig) -> float:
    """Relative rotation angle of the configured initial attitudes."""
    state = config.initial_state()
    return rotation_angle(relative_rotation(state.R1, state.Rr))


class RunService:
    """Service running one closed-loop simulation and writing its files."""

    def __init__(
        self,
        trajectories: Optional[TrajectoryService] = None,
        plots: Optional[PlotService] = None,
    ):
        self.trajectories = trajectories or TrajectoryService()
        self.plots = plots or PlotService()

    def execute(
        self,
        config: SimConfig,
        csv_path: str | Path,
        report_path: str | Path,
        plot_path: str | Path | None = None,
    ) -> RunResult:
        """Run ``config`` and write CSV, report and optional plot.

        运行仿真并写出结果。奇异性中止返回 ``EXIT_SINGULARITY``，积分失败返回
        ``EXIT_FAILURE``（绘图等渲染失败同样如此），文件写入失败返回
        ``EXIT_IO_ERROR``。所有输出先渲染为文本，再一起原子写入；任一文件写入
        失败时不会留下其他输出文件。
        """
        theta0 = initial_angle(config)
        log_details(logger, "Starting run", format_run_details(config), level=logging.DEBUG)
        try:
            records = simulate(config)
        except SingularityError as exc:
            logger.error("Run aborted at singularity: %s", exc)
            return RunResult(EXIT_SINGULARITY, theta0, error=str(exc), singularity_hit=True)
        except StepError as exc:
            logger.error("Integration failed: %s", exc)
            return RunResult(EXIT_FAILURE, theta0, error=str(exc))

        analysis = config.analysis
        report = analyze_trajectory(
            records,
            config.controller,
            threshold=analysis.threshold,
            alpha=analysis.alpha,
            t_window=analysis.fit_window,
        )
        try:
            outputs = {
                csv_path: self.trajectories.render_csv(records),
                report_path: report.to_text(),
            }
            if plot_path:
                outputs[plot_path] = self.plots.render_svg(records, config.controller)
        except Exception as exc:
            logger.error("Could not render outputs: %s", exc)
            return RunResult(EXIT_FAILURE, theta0, report=report, records=records, error=str(exc))
        try:
            write_all_atomic(outputs)
        except OSError as exc:
            logger.error("Could not write outputs: %s", exc)
            return RunResult(EXIT_IO_ERROR, theta0, report=report, records=records, error=str(exc))

        log_details(
            logger,
            "Run finished",
            {
                "controller": report.controller,
                "theta0": f"{report.theta0:.6f}",
                "convergence_time": "none" if report.convergence_time is None else f"{report.convergence_time:.6f}",
                "fitted_rate": "none" if report.fitted_rate is None else f"{report.fitted_rate:.6f}",
                "csv": csv_path,
            },
            level=logging.DEBUG,
        )
        return RunResult(
            EXIT_OK,
            theta0,
            report=report,
            records=records,
            singularity_hit=report.singularity_hit,
        )


def run(
    config: SimConfig,
    csv_path: str | Path,
    report_path: str | Path,
    plot_path: str | Path | None = None,
) -> int:
    """Run one simulation and return the process exit status."""
    result = RunService().execute(config, csv_path, report_path, plot_path)
    if result.ok and result.report is not None and not math.isnan(result.report.final_error):
        logger.info(
            "%s finished: final %s = %.3e",
            result.report.controller,
            config.controller.metric,
            result.report.final_error,
        )
    return result.exit_code

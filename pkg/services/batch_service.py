"""Concurrent batch of seeded runs.

批量运行：对 ``seed_base ... seed_base + n_runs - 1`` 逐个种子运行仿真，
各运行在线程中并发执行，结果按种子顺序汇总到 ``summary.csv``。
"""

from __future__ import annotations

import asyncio
import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from attitude_core.analysis import format_value
from attitude_core.config import SimConfig
from attitude_core.constants import DEFAULT_MAX_WORKERS, EXIT_FAILURE, EXIT_OK, LOG_LEVEL, SUMMARY_HEADER
from attitude_core.logger_utils import log_details

from .run_service import RunResult, RunService
from .trajectory_service import write_atomic

logger = logging.getLogger(__name__)
logger.setLevel(LOG_LEVEL)

SUMMARY_FILE = "summary.csv"


@dataclass(frozen=True)
class SummaryRow:
    """One line of the batch summary."""

    seed: int
    theta0: float
    convergence_time: Optional[float]
    fitted_rate: Optional[float]
    singularity_hit: bool
    theta_monotone: Optional[bool]
    error: Optional[str] = None

    @classmethod
    def from_result(cls, seed: int, result: RunResult) -> "SummaryRow":
        report = result.report
        return cls(
            seed=seed,
            theta0=result.theta0,
            convergence_time=report.convergence_time if report else None,
            fitted_rate=report.fitted_rate if report else None,
            singularity_hit=result.singularity_hit,
            theta_monotone=report.theta_monotone if report else None,
            error=result.error,
        )

    def as_row(self) -> list[str]:
        return [
            str(self.seed),
            format_value(self.theta0),
            format_value(self.convergence_time),
            format_value(self.fitted_rate),
            format_value(self.singularity_hit),
            format_value(self.theta_monotone),
            "" if self.error is None else self.error,
        ]


@dataclass
class BatchSummary:
    """Ordered rows plus the aggregate verdicts."""

    rows: list[SummaryRow] = field(default_factory=list)

    @property
    def any_error(self) -> bool:
        return any(row.error is not None for row in self.rows)

    @property
    def all_theta_monotone(self) -> bool:
        return all(row.theta_monotone is True for row in self.rows)

    @property
    def exit_code(self) -> int:
        return EXIT_FAILURE if self.any_error else EXIT_OK

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        for row in self.rows:
            writer.writerow(row.as_row())
        return buffer.getvalue()


class BatchService:
    """Service running many seeds of one configuration template."""

    def __init__(self, run_service: Optional[RunService] = None, max_workers: int = DEFAULT_MAX_WORKERS):
        if max_workers < 1:
            raise ValueError(f"max_workers must be >= 1, got {max_workers}")
        self.run_service = run_service or RunService()
        self.max_workers = max_workers

    async def _run_one(
        self,
        semaphore: asyncio.Semaphore,
        config: SimConfig,
        seed: int,
        out_dir: Path,
    ) -> SummaryRow:
        async with semaphore:
            seeded = config.with_seed(seed)
            result = await asyncio.to_thread(
                self.run_service.execute,
                seeded,
                out_dir / f"run_{seed}.csv",
                out_dir / f"report_{seed}.txt",
            )
        return SummaryRow.from_result(seed, result)

    async def run_batch(
        self,
        config: SimConfig,
        n_runs: int,
        seed_base: int,
        out_dir: str | Path,
    ) -> BatchSummary:
        """Run ``n_runs`` seeds and write ``summary.csv`` into ``out_dir``.

        单个运行的失败记录在对应行中，不会中断其他运行。
        """
        if n_runs < 1:
            raise ValueError(f"n_runs must be >= 1, got {n_runs}")
        if seed_base < 0:
            raise ValueError(f"seed_base must be non-negative, got {seed_base}")
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)

        semaphore = asyncio.Semaphore(self.max_workers)
        seeds = range(seed_base, seed_base + n_runs)
        # gather keeps the order of its arguments
        rows = await asyncio.gather(*(self._run_one(semaphore, config, seed, out_dir) for seed in seeds))
        summary = BatchSummary(list(rows))
        write_atomic(out_dir / SUMMARY_FILE, summary.to_csv())

        log_details(
            logger,
            "Batch finished",
            {
                "controller": config.controller.tag,
                "runs": n_runs,
                "seeds": f"{seed_base}..{seed_base + n_runs - 1}",
                "errors": sum(1 for row in summary.rows if row.error is not None),
                "theta_monotone": format_value(summary.all_theta_monotone),
                "summary": out_dir / SUMMARY_FILE,
            },
        )
        return summary


def batch(
    config: SimConfig,
    n_runs: int,
    seed_base: int,
    out_dir: str | Path,
    max_workers: int = DEFAULT_MAX_WORKERS,
) -> BatchSummary:
    """Synchronous wrapper around :meth:`BatchService.run_batch`."""
    return asyncio.run(BatchService(max_workers=max_workers).run_batch(config, n_runs, seed_base, out_dir))

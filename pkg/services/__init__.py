"""Services package for the attitude tracking simulator.

This package contains the service modules that sit between the numerical
core and the command line: trajectory files, figures, single runs and
seeded batches.
"""

from .trajectory_service import TrajectoryService
from .plot_service import PlotService
from .run_service import RunResult, RunService, run
from .batch_service import BatchService, BatchSummary, SummaryRow, batch

__all__ = [
    "TrajectoryService",
    "PlotService",
    "RunService",
    "RunResult",
    "run",
    "BatchService",
    "BatchSummary",
    "SummaryRow",
    "batch",
]

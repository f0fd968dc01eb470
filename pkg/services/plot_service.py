"""Static SVG figures of a recorded run.

绘制单次仿真的静态矢量图：上图为 Rr(i,1) 与 R1(i,1)（i = 1, 2）随时间
的轨迹，下图为误差度量的对数曲线。固定 ``svg.hashsalt`` 且不写入日期，
同一输入得到逐字节相同的文件。
"""

from __future__ import annotations

import io
import logging
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from attitude_core.constants import LOG_LEVEL, SVG_HASH_SALT  # noqa: E402
from attitude_core.controllers import ControllerKind  # noqa: E402
from attitude_core.integrator import TrajectoryRecord  # noqa: E402

logger = logging.getLogger(__name__)
logger.setLevel(LOG_LEVEL)

# Lower clip for the log axis once the error has settled
ERROR_PLOT_FLOOR = 1e-16

_STYLE = {
    "font.family": "sans-serif",
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "svg.fonttype": "none",
    "svg.hashsalt": SVG_HASH_SALT,
}


def _title(kind: ControllerKind) -> str:
    mode = "Finite-time tracking" if kind.is_finite_time else "Asymptotic tracking"
    metric = "geodesic" if kind.is_geodesic else "Frobenius"
    return f"{mode} ({kind.tag}, {metric} error)"


class PlotService:
    """Service rendering the tracking figure."""

    def __init__(self, width: float = 6.4, height: float = 6.0):
        self.figsize = (width, height)

    def render_svg(self, records: Sequence[TrajectoryRecord], kind: ControllerKind) -> str:
        """Return the SVG document as text."""
        t = np.array([r.t for r in records])
        Rr = np.array([r.Rr for r in records]).reshape(-1, 3, 3)
        R1 = np.array([r.R1 for r in records]).reshape(-1, 3, 3)
        error = np.array([r.error_measure(kind.metric) for r in records])

        with plt.rc_context(_STYLE):
            fig, (ax_att, ax_err) = plt.subplots(2, 1, figsize=self.figsize, sharex=True)
            try:
                # 仅绘制第一列的前两个元素
                for i, color in ((0, "tab:blue"), (1, "tab:orange")):
                    ax_att.plot(t, Rr[:, i, 0], color=color, linestyle="--", label=f"$R_r({i + 1},1)$")
                    ax_att.plot(t, R1[:, i, 0], color=color, linestyle="-", label=f"$R_1({i + 1},1)$")
                ax_att.set_ylabel("attitude entry")
                ax_att.set_title(_title(kind))
                ax_att.legend(loc="upper right", ncol=2)

                ax_err.semilogy(t, np.maximum(error, ERROR_PLOT_FLOOR), color="black")
                ax_err.set_xlabel("t [s]")
                ax_err.set_ylabel(kind.metric)
                ax_err.set_title("Tracking error")
                fig.tight_layout()

                buffer = io.StringIO()
                fig.savefig(buffer, format="svg", metadata={"Date": None})
            finally:
                plt.close(fig)
        logger.debug("rendered %s plot from %d records", kind.tag, len(records))
        return buffer.getvalue()

"""Post-hoc verification of recorded trajectories.

文件结构：

```
lyapunov_geodesic / lyapunov_frobenius -> 两种 Lyapunov 函数 W
fit_exponential_rate                   -> ln W 对 t 的最小二乘斜率
detect_convergence_time                -> 首次进入且保持在阈值以下的时刻
check_theta_monotone                   -> 相对角单调性（奇异性回避）
reference_offset_residual              -> 参考角速度加常值偏置时 theta' 不变
analyze_trajectory                     -> 汇总为 ConvergenceReport
```

Closed-form expectations used by the checks:

* asy_geo: d_R decays as exp(-t), so ln W has slope -2.
* ftt_geo: d_R decreases linearly at 1/sqrt(2) and reaches zero at
  sqrt(2) d_R(0).
* asy_fro: theta' = -2 sin(theta); W_F decays with rate -4 near zero.
* ftt_fro: theta' = -sqrt(2) cos(theta/2), settling time
  sqrt(2) ln(sec(theta0/2) + tan(theta0/2)).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Iterable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import curve_fit

from .constants import (
    DEFAULT_ALPHA,
    DEFAULT_CONVERGENCE_THRESHOLD,
    DEFAULT_EPS_SWITCH,
    DEFAULT_FIT_WINDOW,
    FLOAT_FORMAT,
    LOG_DELTA,
    LOG_LEVEL,
    MIN_FIT_SAMPLES,
    MONOTONE_TOL,
    W_FLOOR,
)
from .controllers import ControllerKind, control
from .errors import AnalysisError
from .integrator import TrajectoryRecord
from .reference import ReferenceKind, sample
from .so3 import (
    BodyRateVector,
    Rotation,
    dist_frobenius,
    dist_geodesic,
    hat,
    orthogonality_error,
    relative_rotation,
    rotation_angle,
)

logger = logging.getLogger(__name__)
logger.setLevel(LOG_LEVEL)

_SQRT2 = math.sqrt(2.0)


class MonotonicityCheck(NamedTuple):
    """Result of a monotonicity scan: verdict and worst increment."""

    monotone: bool
    max_increment: float


def lyapunov_geodesic(Rr: Rotation, R1: Rotation) -> float:
    """``W = d_R^2 = 1/2 ||log(Rr^T R1)||_F^2``.

    测地 Lyapunov 函数，theta 到达奇异集时抛出 :class:`SingularityError`。
    """
    d = dist_geodesic(Rr, R1)
    return d * d


def lyapunov_frobenius(Rr: Rotation, R1: Rotation) -> float:
    """``W_F = 3 - trace(Rr^T R1) = 1/2 d_F^2``.

    Evaluated through the chordal distance, which keeps full precision
    when the two attitudes nearly coincide.
    """
    d = dist_frobenius(Rr, R1)
    return 0.5 * d * d


def lyapunov_frobenius_trace(Rr: Rotation, R1: Rotation) -> float:
    """``3 - trace(Rr^T R1)`` evaluated literally."""
    return 3.0 - float(np.trace(relative_rotation(Rr, R1)))


def decay_exponent(alpha: float) -> float:
    """``beta = (2 alpha - 1) / (2 alpha)`` for ``V = W^alpha``."""
    if alpha <= 0.5:
        raise ValueError(f"alpha must exceed 1/2, got {alpha}")
    return (2.0 * alpha - 1.0) / (2.0 * alpha)


def lyapunov_power(W: float, alpha: float = DEFAULT_ALPHA) -> float:
    """``V = W^alpha``."""
    if W < 0.0:
        raise ValueError(f"W must be non-negative, got {W}")
    return W ** alpha


def settling_time_bound(W0: float, alpha: float = DEFAULT_ALPHA) -> float:
    """Time for ``V' = -alpha sqrt(2) V^beta`` to bring ``V = W^alpha`` to zero.

    有限时间收敛的上界 ``V0^(1-beta) / (alpha sqrt(2) (1-beta))``。对测地
    有限时间律，该值对任意 alpha 都等于 ``sqrt(2) d_R(0)``。
    """
    beta = decay_exponent(alpha)
    V0 = lyapunov_power(W0, alpha)
    return V0 ** (1.0 - beta) / (alpha * _SQRT2 * (1.0 - beta))


def predicted_convergence_time(kind: ControllerKind, theta0: float) -> float | None:
    """Closed-form settling time of a finite-time law from relative angle ``theta0``.

    Asymptotic laws never settle, so ``None`` is returned for them.
    """
    if not kind.is_finite_time:
        return None
    if kind.is_geodesic:
        return settling_time_bound(theta0 * theta0)
    half = 0.5 * theta0
    return _SQRT2 * math.log(1.0 / math.cos(half) + math.tan(half))


def _window(records: Sequence[TrajectoryRecord], t_window: tuple[float, float]):
    t0, t1 = t_window
    t = np.array([r.t for r in records if t0 <= r.t <= t1 and r.W > W_FLOOR])
    W = np.array([r.W for r in records if t0 <= r.t <= t1 and r.W > W_FLOOR])
    return t, W


def _log_line(t, rate, intercept):
    return rate * t + intercept


def fit_exponential_rate(
    records: Sequence[TrajectoryRecord],
    t_window: tuple[float, float] = DEFAULT_FIT_WINDOW,
) -> float:
    """Least-squares slope of ``ln W`` against ``t`` inside ``t_window``.

    对窗口内 ``W > W_FLOOR`` 的样本做 ``ln W`` 与 ``t`` 的线性回归，
    返回斜率（1/s）。样本少于 ``MIN_FIT_SAMPLES`` 时抛出
    :class:`AnalysisError`。
    """
    t, W = _window(records, t_window)
    if t.size < MIN_FIT_SAMPLES:
        raise AnalysisError(
            f"need at least {MIN_FIT_SAMPLES} samples with W > {W_FLOOR:g} in {t_window}, got {t.size}"
        )
    popt, pcov = curve_fit(_log_line, t, np.log(W), p0=(0.0, float(np.log(W[0]))))
    slope = float(popt[0])
    logger.debug("fit_exponential_rate: slope %.6f stderr %.3e over %d samples", slope, math.sqrt(pcov[0, 0]), t.size)
    return slope


def detect_convergence_time(
    records: Sequence[TrajectoryRecord],
    threshold: float = DEFAULT_CONVERGENCE_THRESHOLD,
    metric: str = "d_R",
    eps_switch: float = DEFAULT_EPS_SWITCH,
) -> float | None:
    """First record time after which the error stays below ``threshold``.

    返回误差首次低于阈值并一直保持到终点的时刻；从未满足时返回 ``None``。
    """
    if threshold <= 10.0 * eps_switch:
        raise ValueError(f"threshold {threshold:g} must exceed 10 * eps_switch = {10.0 * eps_switch:g}")
    detected: float | None = None
    for record in records:
        error = record.error_measure(metric)
        if error < threshold:
            if detected is None:
                detected = record.t
        else:
            detected = None
    return detected


def _scan_increments(values: Iterable[float], tol: float) -> MonotonicityCheck:
    worst = 0.0
    previous: float | None = None
    for value in values:
        if previous is not None:
            worst = max(worst, value - previous)
        previous = value
    return MonotonicityCheck(worst <= tol, worst)


def check_theta_monotone(
    records: Sequence[TrajectoryRecord],
    tol: float = MONOTONE_TOL,
) -> MonotonicityCheck:
    """Check that theta never grows by more than ``tol`` between records.

    检查相对角是否单调不增（允许 ``tol`` 的离散误差），同时返回最大增量。
    """
    return _scan_increments((r.theta for r in records), tol)


def check_lyapunov_monotone(
    records: Sequence[TrajectoryRecord],
    tol: float = MONOTONE_TOL,
) -> MonotonicityCheck:
    """Same scan as :func:`check_theta_monotone` on the recorded ``W``."""
    return _scan_increments((r.W for r in records), tol)


def frobenius_rate_residual(records: Sequence[TrajectoryRecord], w_min: float = 1e-4) -> float:
    """Largest relative mismatch of ``W_F' = -sqrt(2) (1 + cos theta) sqrt(W_F)``.

    Derivatives are central differences of ``W_F = d_F^2 / 2`` on the
    recorded grid. Samples with ``W_F <= w_min`` are skipped, which keeps the
    sampled boundary layer near the target out of the comparison. Only
    meaningful for ftt_fro runs.
    """
    t = np.array([r.t for r in records])
    WF = np.array([0.5 * r.d_F * r.d_F for r in records])
    theta = np.array([r.theta for r in records])
    if t.size < 3:
        raise AnalysisError("need at least 3 records for a central difference")
    dW = (WF[2:] - WF[:-2]) / (t[2:] - t[:-2])
    predicted = -_SQRT2 * (1.0 + np.cos(theta[1:-1])) * np.sqrt(WF[1:-1])
    mask = (WF[:-2] > w_min) & (WF[2:] > w_min)
    if not np.any(mask):
        raise AnalysisError("no samples before convergence")
    residual = np.abs(dW[mask] - predicted[mask]) / np.abs(predicted[mask])
    return float(np.max(residual))


def theta_rate(
    R1: Rotation,
    Rr: Rotation,
    omega1: BodyRateVector,
    omega_r: BodyRateVector,
) -> float:
    """Instantaneous rate of the relative angle of ``Q = R1^T Rr``.

    由 ``dQ/dt = Q hat(omega_r) - hat(omega1) Q`` 求迹的导数，再得到
    ``theta' = -(d trace Q / dt) / (2 sin theta)``。theta 为 0 或 pi 时无定义。
    """
    Q = relative_rotation(R1, Rr)
    s = math.sin(rotation_angle(Q))
    if s <= 0.0:
        raise ValueError("relative angle rate is undefined at theta = 0 and theta = pi")
    dtrace = float(np.trace(Q @ hat(omega_r) - hat(omega1) @ Q))
    return -dtrace / (2.0 * s)


def reference_offset_residual(
    records: Sequence[TrajectoryRecord],
    kind: ControllerKind,
    reference: ReferenceKind,
    offset: Sequence[float],
    sample_time: float | None = None,
    min_angle: float = 1e-3,
) -> float:
    """Largest change of ``theta'`` when ``offset`` is added to the reference rate.

    The offset drives the target and enters the feed-forward of the law at
    every recorded state. Records with theta within ``min_angle`` of 0 or pi
    are skipped.
    """
    shift = np.asarray(offset, dtype=float).reshape(3)
    worst = 0.0
    compared = 0
    for record in records:
        if not min_angle < record.theta < math.pi - min_angle:
            continue
        R1, Rr = record.r1_matrix(), record.rr_matrix()
        omega_r = sample(reference, record.t)
        base = control(kind, R1, Rr, omega_r, sample_time=sample_time)
        shifted = control(kind, R1, Rr, omega_r + shift, sample_time=sample_time)
        change = theta_rate(R1, Rr, shifted.omega1, omega_r + shift) - theta_rate(R1, Rr, base.omega1, omega_r)
        worst = max(worst, abs(change))
        compared += 1
    if compared == 0:
        raise AnalysisError("no records away from the target and the singular set")
    logger.debug("reference_offset_residual: %.3e over %d records", worst, compared)
    return worst


@dataclass(frozen=True)
class ConvergenceReport:
    """Verdicts and fitted quantities for one recorded trajectory.

    单条轨迹的收敛报告，可序列化为扁平的 ``key = value`` 文本。
    """

    controller: str
    theta0: float
    d0: float
    theta_monotone: bool
    theta_max_increment: float
    lyapunov_monotone: bool
    lyapunov_max_increment: float
    fitted_rate: float | None
    convergence_time: float | None
    predicted_time: float | None
    singularity_hit: bool
    threshold: float
    alpha: float
    beta: float
    V_final: float
    final_error: float
    max_orthogonality_error: float
    t_final: float

    def as_dict(self) -> dict[str, Any]:
        return {
            "controller": self.controller,
            "theta0": self.theta0,
            "d0": self.d0,
            "theta_monotone": self.theta_monotone,
            "theta_max_increment": self.theta_max_increment,
            "lyapunov_monotone": self.lyapunov_monotone,
            "lyapunov_max_increment": self.lyapunov_max_increment,
            "fitted_rate": self.fitted_rate,
            "convergence_time": self.convergence_time,
            "predicted_time": self.predicted_time,
            "singularity_hit": self.singularity_hit,
            "threshold": self.threshold,
            "alpha": self.alpha,
            "beta": self.beta,
            "V_final": self.V_final,
            "final_error": self.final_error,
            "max_orthogonality_error": self.max_orthogonality_error,
            "t_final": self.t_final,
        }

    def to_text(self) -> str:
        """Flat key-value block, one ``key = value`` per line."""
        lines = []
        for key, value in self.as_dict().items():
            lines.append(f"{key} = {format_value(value, key)}")
        return "\n".join(lines) + "\n"


def format_value(value: Any, key: str = "") -> str:
    """Locale-independent text for report values."""
    if value is None:
        return "n/a" if key == "predicted_time" else "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, FLOAT_FORMAT)
    return str(value)


def parse_report_text(text: str) -> dict[str, str]:
    """Read a report block back into a ``key -> raw value`` mapping."""
    values: dict[str, str] = {}
    for line in text.splitlines():
        if not line.strip() or "=" not in line:
            continue
        key, _, raw = line.partition("=")
        values[key.strip()] = raw.strip()
    return values


def analyze_trajectory(
    records: Sequence[TrajectoryRecord],
    kind: ControllerKind,
    threshold: float = DEFAULT_CONVERGENCE_THRESHOLD,
    alpha: float = DEFAULT_ALPHA,
    t_window: tuple[float, float] = DEFAULT_FIT_WINDOW,
) -> ConvergenceReport:
    """Build the :class:`ConvergenceReport` of a recorded run."""
    if not records:
        raise AnalysisError("no records to analyse")
    metric = kind.metric
    first, last = records[0], records[-1]
    theta_check = check_theta_monotone(records)
    w_check = check_lyapunov_monotone(records)
    try:
        rate: float | None = fit_exponential_rate(records, t_window)
    except AnalysisError as exc:
        logger.debug("rate fit skipped: %s", exc)
        rate = None
    convergence = detect_convergence_time(records, threshold, metric, kind.eps_switch)
    singular = any(
        math.isnan(r.d_R) or r.theta >= math.pi - LOG_DELTA for r in records
    )
    ortho = max(
        max(orthogonality_error(r.rr_matrix()), orthogonality_error(r.r1_matrix())) for r in records
    )
    return ConvergenceReport(
        controller=kind.tag,
        theta0=first.theta,
        d0=first.error_measure(metric),
        theta_monotone=theta_check.monotone,
        theta_max_increment=theta_check.max_increment,
        lyapunov_monotone=w_check.monotone,
        lyapunov_max_increment=w_check.max_increment,
        fitted_rate=rate,
        convergence_time=convergence,
        predicted_time=predicted_convergence_time(kind, first.theta),
        singularity_hit=singular,
        threshold=threshold,
        alpha=alpha,
        beta=decay_exponent(alpha),
        V_final=lyapunov_power(last.W, alpha),
        final_error=last.error_measure(metric),
        max_orthogonality_error=ortho,
        t_final=last.t,
    )

"""Attitude tracking feedback laws.

文件结构：

```
ControllerKind -> 控制律标签与切换半径
ControlOutput  -> 跟随者体角速度与诊断量
control()      -> 四种控制律的统一入口
```

Two error signals are used. The geodesic laws feed back
``log(R1^T Rr)``; the Frobenius laws feed back ``R1^T Rr - Rr^T R1``.
Each comes in an asymptotic form and a normalised finite-time form. Only
relative attitude enters the feedback, so every law is invariant under a
common left rotation of both attitudes.

The finite-time laws are discontinuous at ``R1 = Rr``. At the equilibrium
(error below ``eps_switch``) the feedback term is dropped, which is the
Filippov selection that keeps a sliding state on the target. When the
caller passes the integration step, the normalising denominator is
floored at the distance the law covers in one step so a sampled
trajectory lands on the target instead of jumping past it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .constants import CONTROLLER_TAGS, DEFAULT_EPS_SWITCH, LOG_DELTA, LOG_LEVEL
from .errors import SingularityError
from .so3 import BodyRateVector, Rotation, log_so3, relative_rotation, rotation_angle, vee

logger = logging.getLogger(__name__)
logger.setLevel(LOG_LEVEL)

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ControllerKind:
    """Control law tag with its regularisation radius.

    控制律标签：``asy_geo``、``ftt_geo``、``asy_fro``、``ftt_fro``。
    ``eps_switch`` 以对应度量 (d_R 或 d_F) 为单位。
    """

    tag: str = "asy_geo"
    eps_switch: float = DEFAULT_EPS_SWITCH

    def __post_init__(self) -> None:
        if self.tag not in CONTROLLER_TAGS:
            raise ValueError(f"unknown controller '{self.tag}', expected one of {CONTROLLER_TAGS}")
        if not (self.eps_switch > 0.0 and math.isfinite(self.eps_switch)):
            raise ValueError(f"eps_switch must be positive, got {self.eps_switch}")

    @property
    def is_finite_time(self) -> bool:
        return self.tag.startswith("ftt")

    @property
    def is_geodesic(self) -> bool:
        return self.tag.endswith("geo")

    @property
    def metric(self) -> str:
        """Name of the distance the law is built on (``d_R`` or ``d_F``)."""
        return "d_R" if self.is_geodesic else "d_F"


@dataclass(frozen=True)
class ControlOutput:
    """Commanded follower body rate and the error it was computed from.

    When :func:`control` is given a ``sample_time``, the finite-time laws
    floor their normalising denominator at the one-step distance
    (``max(||log Q||_F, h)`` for ftt_geo, ``max(d_F, 2h)`` for ftt_fro).
    Inside that layer ``omega1`` is smaller than the pure law, so records
    from a simulation carry the sampled command, not the formula value.
    """

    omega1: BodyRateVector
    error_measure: float
    regularized: bool


def feedback_term(output: ControlOutput, omega_r: npt.ArrayLike) -> BodyRateVector:
    """Return ``omega1 - omega_r``, the part of the command added by feedback."""
    return output.omega1 - np.asarray(omega_r, dtype=float)


def control(
    kind: ControllerKind,
    R1: Rotation,
    Rr: Rotation,
    omega_r: npt.ArrayLike,
    sample_time: float | None = None,
) -> ControlOutput:
    """Evaluate the selected law for follower ``R1`` and target ``Rr``.

    计算跟随者的体角速度指令。相对角达到 ``pi - LOG_DELTA`` 时抛出
    :class:`SingularityError`，不做任何截断。

    Parameters
    ----------
    kind: ControllerKind
        Law and switching radius.
    R1, Rr: Rotation
        Follower and target attitudes.
    omega_r: BodyRateVector
        Target body rate, used as feed-forward.
    sample_time: float | None, optional
        Integration step. Only the finite-time laws use it, to floor their
        normalising denominator. ``None`` returns the pure law.
    """
    omega_r = np.asarray(omega_r, dtype=float)
    R1 = np.asarray(R1, dtype=float)
    Rr = np.asarray(Rr, dtype=float)
    Q = relative_rotation(R1, Rr)
    theta = rotation_angle(Q)
    if theta >= math.pi - LOG_DELTA:
        raise SingularityError(
            f"relative rotation angle {theta:.12f} reached the singular set", theta=theta
        )

    if kind.is_geodesic:
        L = log_so3(Q)
        norm_L = float(np.linalg.norm(L))
        error = norm_L / _SQRT2
        if kind.tag == "asy_geo":
            return ControlOutput(vee(L) + omega_r, error, error < kind.eps_switch)
        if error < kind.eps_switch:
            return ControlOutput(omega_r.copy(), error, True)
        denom = max(norm_L, sample_time) if sample_time else norm_L
        return ControlOutput(vee(L) / denom + omega_r, error, False)

    A = Q - Q.T
    error = float(np.linalg.norm(R1 - Rr))
    if kind.tag == "asy_fro":
        return ControlOutput(vee(A) + omega_r, error, error < kind.eps_switch)
    if error < kind.eps_switch:
        return ControlOutput(omega_r.copy(), error, True)
    denom = max(error, 2.0 * sample_time) if sample_time else error
    return ControlOutput(vee(A) / denom + omega_r, error, False)

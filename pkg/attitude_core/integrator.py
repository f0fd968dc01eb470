"""Structure-preserving integration of the closed tracking loop.

文件结构：

```
SimState         -> 时间与两个姿态
IntegratorSpec   -> 积分方法、步长与重正交化周期
TrajectoryRecord -> 一个采样时刻的完整诊断
step()           -> 单步推进（Lie-Euler 或 Lie 代数中的 RK4）
simulate()       -> 按配置运行整个仿真
```

Both attitudes follow ``dR/dt = R hat(omega)``. Every update multiplies by
an exact exponential, so iterates leave SO(3) only through round-off; a
polar projection every ``reproject_every`` steps removes that drift.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

import numpy as np

from .constants import (
    DEFAULT_METHOD,
    DEFAULT_REPROJECT_EVERY,
    DEFAULT_STEP,
    INTEGRATOR_METHODS,
    LOG_DELTA,
    LOG_LEVEL,
)
from .controllers import ControlOutput, ControllerKind, control
from .errors import SingularityError, StepError, ValidationError
from .reference import ReferenceKind, sample
from .so3 import (
    Rotation,
    dist_frobenius,
    exp_so3,
    log_so3,
    project_to_so3,
    relative_rotation,
    rotation_angle,
)

if TYPE_CHECKING:  # pragma: no cover
    from .config import SimConfig

logger = logging.getLogger(__name__)
logger.setLevel(LOG_LEVEL)

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class SimState:
    """Closed-loop state: time, target attitude and follower attitude."""

    t: float
    Rr: Rotation
    R1: Rotation


@dataclass(frozen=True)
class IntegratorSpec:
    """Integration scheme settings.

    积分设置：``lie_euler`` 或 ``lie_rk4``，步长 ``h`` 秒，每
    ``reproject_every`` 步做一次重正交化。
    """

    method: str = DEFAULT_METHOD
    h: float = DEFAULT_STEP
    reproject_every: int = DEFAULT_REPROJECT_EVERY

    def __post_init__(self) -> None:
        if self.method not in INTEGRATOR_METHODS:
            raise ValueError(f"unknown integrator '{self.method}', expected one of {INTEGRATOR_METHODS}")
        if not (self.h > 0.0 and math.isfinite(self.h)):
            raise ValueError(f"step size must be positive, got {self.h}")
        if int(self.reproject_every) != self.reproject_every or self.reproject_every < 1:
            raise ValueError(f"reproject_every must be an integer >= 1, got {self.reproject_every}")


@dataclass(frozen=True)
class TrajectoryRecord:
    """One sample of the closed loop.

    单个采样点：两个姿态（行优先 9 元组）、相对角 theta、测地距离 d_R
    （theta 到达奇异集时为 nan）、Frobenius 距离 d_F、当前控制律的
    Lyapunov 函数 W、跟随者角速度范数及正则化标志。
    """

    t: float
    Rr: tuple[float, ...]
    R1: tuple[float, ...]
    theta: float
    d_R: float
    d_F: float
    W: float
    omega1_norm: float
    regularized: bool

    def rr_matrix(self) -> Rotation:
        return np.array(self.Rr, dtype=float).reshape(3, 3)

    def r1_matrix(self) -> Rotation:
        return np.array(self.R1, dtype=float).reshape(3, 3)

    def error_measure(self, metric: str) -> float:
        """Return ``d_R`` or ``d_F`` by name."""
        if metric == "d_R":
            return self.d_R
        if metric == "d_F":
            return self.d_F
        raise ValueError(f"unknown metric '{metric}'")


def _closed_loop_rates(
    t: float,
    Rr: Rotation,
    R1: Rotation,
    kind: ControllerKind,
    ref: ReferenceKind,
    sample_time: float,
) -> tuple[np.ndarray, ControlOutput]:
    omega_r = sample(ref, t)
    return omega_r, control(kind, R1, Rr, omega_r, sample_time=sample_time)


def _dexpinv(u: np.ndarray, omega: np.ndarray) -> np.ndarray:
    # inverse dexp truncated after the first commutator
    return omega - 0.5 * np.cross(u, omega)


def _lie_euler(state: SimState, h: float, rates: Callable) -> tuple[SimState, ControlOutput]:
    omega_r, out = rates(state.t, state.Rr, state.R1)
    Rr = state.Rr @ exp_so3(h * omega_r)
    R1 = state.R1 @ exp_so3(h * out.omega1)
    return SimState(state.t + h, Rr, R1), out


def _lie_rk4(state: SimState, h: float, rates: Callable) -> tuple[SimState, ControlOutput]:
    """Classical RK4 on the local coordinates ``u`` with ``u(0) = 0``."""
    t, Rr, R1 = state.t, state.Rr, state.R1
    omega_r, out = rates(t, Rr, R1)
    k1r, k11 = omega_r, out.omega1

    ur, u1 = 0.5 * h * k1r, 0.5 * h * k11
    wr, o2 = rates(t + 0.5 * h, Rr @ exp_so3(ur), R1 @ exp_so3(u1))
    k2r, k21 = _dexpinv(ur, wr), _dexpinv(u1, o2.omega1)

    ur, u1 = 0.5 * h * k2r, 0.5 * h * k21
    wr, o3 = rates(t + 0.5 * h, Rr @ exp_so3(ur), R1 @ exp_so3(u1))
    k3r, k31 = _dexpinv(ur, wr), _dexpinv(u1, o3.omega1)

    ur, u1 = h * k3r, h * k31
    wr, o4 = rates(t + h, Rr @ exp_so3(ur), R1 @ exp_so3(u1))
    k4r, k41 = _dexpinv(ur, wr), _dexpinv(u1, o4.omega1)

    ur = (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
    u1 = (h / 6.0) * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
    return SimState(t + h, Rr @ exp_so3(ur), R1 @ exp_so3(u1)), out


def _advance(
    state: SimState,
    kind: ControllerKind,
    ref: ReferenceKind,
    spec: IntegratorSpec,
    h: float,
) -> tuple[SimState, ControlOutput]:
    def rates(t, Rr, R1):
        return _closed_loop_rates(t, Rr, R1, kind, ref, spec.h)

    if spec.method == "lie_euler":
        new_state, out = _lie_euler(state, h, rates)
    else:
        new_state, out = _lie_rk4(state, h, rates)
    if not (np.all(np.isfinite(new_state.Rr)) and np.all(np.isfinite(new_state.R1))):
        raise StepError(f"non-finite attitude after step from t = {state.t:.6g} s", time=state.t)
    return new_state, out


def step(
    state: SimState,
    kind: ControllerKind,
    ref: ReferenceKind,
    spec: IntegratorSpec,
) -> SimState:
    """Advance the closed loop by one step of size ``spec.h``.

    单步推进闭环系统。控制器抛出的 :class:`SingularityError` 原样向上传递。
    Reprojection is handled by :func:`simulate`, which knows the step index.
    """
    new_state, _ = _advance(state, kind, ref, spec, spec.h)
    return new_state


def make_record(
    state: SimState,
    kind: ControllerKind,
    out: ControlOutput,
) -> TrajectoryRecord:
    """Compute the diagnostics of ``state`` given the control evaluated there."""
    Q = relative_rotation(state.R1, state.Rr)
    theta = rotation_angle(Q)
    if theta < math.pi - LOG_DELTA:
        d_R = float(np.linalg.norm(log_so3(Q))) / _SQRT2
    else:
        d_R = float("nan")
    d_F = dist_frobenius(state.R1, state.Rr)
    W = d_R * d_R if kind.is_geodesic else 0.5 * d_F * d_F
    return TrajectoryRecord(
        t=float(state.t),
        Rr=tuple(float(x) for x in state.Rr.ravel()),
        R1=tuple(float(x) for x in state.R1.ravel()),
        theta=theta,
        d_R=d_R,
        d_F=d_F,
        W=W,
        omega1_norm=float(np.linalg.norm(out.omega1)),
        regularized=bool(out.regularized),
    )


def simulate(config: "SimConfig") -> list[TrajectoryRecord]:
    """Run one closed-loop simulation described by ``config``.

    按配置运行一次仿真，每 ``sample_every`` 步以及终点记录一次，
    给定种子时结果完全确定。失败时异常携带出错时刻。
    """
    spec = config.integrator
    kind = config.controller
    ref = config.reference
    if config.t_final < 0.0:
        raise ValidationError("t_final", f"must be non-negative, got {config.t_final}")

    state = config.initial_state()
    h = spec.h
    n_steps = int(math.ceil(config.t_final / h - 1e-9)) if config.t_final > 0.0 else 0
    logger.debug("simulate: %s steps of %s with %s", n_steps, h, kind.tag)

    records: list[TrajectoryRecord] = []
    for k in range(n_steps + 1):
        t_k = min(k * h, config.t_final)
        state = SimState(t_k, state.Rr, state.R1)
        if k == n_steps:
            try:
                _, out = _closed_loop_rates(t_k, state.Rr, state.R1, kind, ref, h)
            except SingularityError as exc:
                raise exc.at_time(t_k) from exc
            records.append(make_record(state, kind, out))
            break
        step_h = min(h, config.t_final - t_k)
        try:
            new_state, out = _advance(state, kind, ref, spec, step_h)
        except SingularityError as exc:
            raise exc.at_time(t_k) from exc
        if k % config.sample_every == 0:
            records.append(make_record(state, kind, out))
        Rr, R1 = new_state.Rr, new_state.R1
        if (k + 1) % spec.reproject_every == 0:
            Rr, R1 = project_to_so3(Rr), project_to_so3(R1)
        state = SimState(new_state.t, Rr, R1)
    return records

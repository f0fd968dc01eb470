"""Target body angular velocity generators.

参考（目标）角速度生成器。``paper_sim`` 为无界参考
``omega_r(t) = t sin(3t) (1, 1, 1)``；其余三种用于隔离控制器行为的测试。
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import numpy.typing as npt

from .constants import (
    DEFAULT_AMPLITUDE,
    DEFAULT_FREQUENCY,
    DEFAULT_PHASE,
    LOG_LEVEL,
    REFERENCE_TAGS,
)

logger = logging.getLogger(__name__)
logger.setLevel(LOG_LEVEL)

Vector3 = tuple[float, float, float]


def _as_vector3(name: str, values: Sequence[float]) -> Vector3:
    if len(values) != 3:
        raise ValueError(f"{name} must have 3 components, got {len(values)}")
    vec = tuple(float(v) for v in values)
    if not all(math.isfinite(v) for v in vec):
        raise ValueError(f"{name} must be finite, got {vec}")
    return vec  # type: ignore[return-value]


@dataclass(frozen=True)
class ReferenceKind:
    """Selected reference generator with its parameters.

    参考信号类型及参数（幅值 rad/s、频率 rad/s、相位 rad）。
    """

    tag: str = "paper_sim"
    amplitude: Vector3 = DEFAULT_AMPLITUDE
    frequency: Vector3 = DEFAULT_FREQUENCY
    phase: Vector3 = DEFAULT_PHASE

    def __post_init__(self) -> None:
        if self.tag not in REFERENCE_TAGS:
            raise ValueError(f"unknown reference '{self.tag}', expected one of {REFERENCE_TAGS}")
        object.__setattr__(self, "amplitude", _as_vector3("amplitude", self.amplitude))
        object.__setattr__(self, "frequency", _as_vector3("frequency", self.frequency))
        object.__setattr__(self, "phase", _as_vector3("phase", self.phase))
        if any(f < 0.0 for f in self.frequency):
            raise ValueError(f"frequency must be non-negative, got {self.frequency}")

    @classmethod
    def paper_sim(cls) -> "ReferenceKind":
        return cls("paper_sim")

    @classmethod
    def constant(cls, amplitude: Sequence[float]) -> "ReferenceKind":
        return cls("constant", amplitude=tuple(amplitude))

    @classmethod
    def sinusoid(
        cls,
        amplitude: Sequence[float],
        frequency: Sequence[float],
        phase: Sequence[float] = DEFAULT_PHASE,
    ) -> "ReferenceKind":
        return cls("sinusoid", amplitude=tuple(amplitude), frequency=tuple(frequency), phase=tuple(phase))

    @classmethod
    def zero(cls) -> "ReferenceKind":
        return cls("zero")


def sample(kind: ReferenceKind, t: float) -> npt.NDArray[np.float64]:
    """Evaluate the target body rate at time ``t``.

    计算 ``t`` 时刻的参考角速度（体坐标系，rad/s）。
    """
    if t < 0.0:
        raise ValueError(f"reference time must be non-negative, got {t}")
    if kind.tag == "paper_sim":
        value = t * math.sin(3.0 * t)
        return np.array([value, value, value])
    if kind.tag == "constant":
        return np.array(kind.amplitude)
    if kind.tag == "sinusoid":
        a = np.array(kind.amplitude)
        f = np.array(kind.frequency)
        phi = np.array(kind.phase)
        return a * np.sin(f * t + phi)
    return np.zeros(3)

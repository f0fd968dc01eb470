"""Rotation group maps and metrics.

文件结构：

```
hat / vee              -> R^3 与 so(3) 之间的同构
exp_so3 / log_so3      -> Rodrigues 指数映射与主对数
rotation_angle         -> 旋转角 theta
dist_*                 -> Frobenius、测地、双曲三种度量
project_to_so3         -> 极分解重新正交化
random_rotation        -> 轴角随机采样
```

All functions take and return ``float64`` numpy arrays in row-major 3x3
layout. Nothing here mutates its inputs.
"""

from __future__ import annotations

import logging
import math

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .constants import (
    LOG_DELTA,
    LOG_LEVEL,
    RANK_TOL,
    ROTATION_TOL,
    SERIES_THRESHOLD,
    SKEW_TOL,
)
from .errors import ManifoldError, SingularityError

logger = logging.getLogger(__name__)
logger.setLevel(LOG_LEVEL)

Rotation = npt.NDArray[np.float64]
SkewMatrix = npt.NDArray[np.float64]
BodyRateVector = npt.NDArray[np.float64]

IDENTITY = np.eye(3)
IDENTITY.setflags(write=False)

# Singular set: relative attitudes with rotation angle pi 奇异集
E1 = np.diag([-1.0, -1.0, 1.0])
E2 = np.diag([-1.0, 1.0, -1.0])
E3 = np.diag([1.0, -1.0, -1.0])
for _m in (E1, E2, E3):
    _m.setflags(write=False)

_SQRT2 = math.sqrt(2.0)


def hat(p: npt.ArrayLike) -> SkewMatrix:
    """Map a 3-vector to its skew-symmetric matrix.

    将三维向量映射为反对称矩阵 ``p^``。
    """
    p1, p2, p3 = (float(x) for x in np.asarray(p, dtype=float).reshape(3))
    return np.array(
        [
            [0.0, -p3, p2],
            [p3, 0.0, -p1],
            [-p2, p1, 0.0],
        ]
    )


def vee(S: npt.ArrayLike) -> BodyRateVector:
    """Inverse of :func:`hat` on the skew part of ``S``.

    取 ``(S - S^T)/2`` 的三维坐标。对称部分超过 ``SKEW_TOL`` 时视为非 so(3)
    输入并抛出 :class:`ManifoldError`。
    """
    S = np.asarray(S, dtype=float)
    sym = 0.5 * (S + S.T)
    sym_norm = np.linalg.norm(sym)
    if sym_norm > SKEW_TOL:
        raise ManifoldError(f"matrix is not skew-symmetric (symmetric part {sym_norm:.3e})")
    A = 0.5 * (S - S.T)
    return np.array([A[2, 1], A[0, 2], A[1, 0]])


def exp_so3(p: npt.ArrayLike) -> Rotation:
    """Rodrigues exponential of the rotation vector ``p``.

    Rodrigues 公式：绕轴 ``p`` 逆时针旋转 ``||p||`` 的旋转矩阵。小角度下
    两个系数用四阶泰勒级数计算以避免抵消误差。
    """
    p = np.asarray(p, dtype=float).reshape(3)
    P = hat(p)
    theta = float(np.linalg.norm(p))
    if theta < SERIES_THRESHOLD:
        t2 = theta * theta
        a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0
        b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0
    else:
        a = math.sin(theta) / theta
        # (1 - cos)/theta^2 written without the cancellation
        half = math.sin(0.5 * theta) / theta
        b = 2.0 * half * half
    return IDENTITY + a * P + b * (P @ P)


def rotation_angle(R: npt.ArrayLike) -> float:
    """Return theta = arccos((trace(R) - 1)/2) in ``[0, pi]``.

    The arccos argument is clamped to ``[-1, 1]``. For angles up to pi/3 the
    same angle is read from the skew part (sin theta) instead, where arccos
    loses half of the available digits.
    """
    R = np.asarray(R, dtype=float)
    c = 0.5 * (float(np.trace(R)) - 1.0)
    c = min(1.0, max(-1.0, c))
    if c >= 0.5:
        w = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
        s = min(1.0, 0.5 * float(np.linalg.norm(w)))
        return math.asin(s)
    return math.acos(c)


def log_so3(R: npt.ArrayLike) -> SkewMatrix:
    """Principal logarithm ``theta/(2 sin theta) (R - R^T)``.

    主对数，仅在 ``theta < pi - LOG_DELTA`` 上有定义；越界时抛出
    :class:`SingularityError`。
    """
    R = np.asarray(R, dtype=float)
    theta = rotation_angle(R)
    if theta >= math.pi - LOG_DELTA:
        raise SingularityError(
            f"logarithm undefined at rotation angle {theta:.12f} (pi - {math.pi - theta:.3e})",
            theta=theta,
        )
    if theta < SERIES_THRESHOLD:
        t2 = theta * theta
        coeff = 0.5 + t2 / 12.0 + 7.0 * t2 * t2 / 720.0
    else:
        coeff = theta / (2.0 * math.sin(theta))
    return coeff * (R - R.T)


def relative_rotation(R1: npt.ArrayLike, R2: npt.ArrayLike) -> Rotation:
    """Return ``R1^T R2``, the attitude of frame 2 seen from frame 1."""
    return np.asarray(R1, dtype=float).T @ np.asarray(R2, dtype=float)


def dist_frobenius(R1: npt.ArrayLike, R2: npt.ArrayLike) -> float:
    """Chordal distance ``||R1 - R2||_F``."""
    return float(np.linalg.norm(np.asarray(R1, dtype=float) - np.asarray(R2, dtype=float)))


def dist_frobenius_trace(R1: npt.ArrayLike, R2: npt.ArrayLike) -> float:
    """Chordal distance through ``sqrt(6 - 2 trace(R1^T R2))``."""
    value = 6.0 - 2.0 * float(np.trace(relative_rotation(R1, R2)))
    return math.sqrt(max(0.0, value))


def dist_geodesic(R1: npt.ArrayLike, R2: npt.ArrayLike) -> float:
    """Riemannian distance ``||log(R1^T R2)||_F / sqrt(2)``.

    测地距离，等于相对旋转角。
    """
    return float(np.linalg.norm(log_so3(relative_rotation(R1, R2)))) / _SQRT2


def dist_hyperbolic(R1: npt.ArrayLike, R2: npt.ArrayLike) -> float:
    """Hyperbolic distance ``||log(R1) - log(R2)||_F``."""
    return float(np.linalg.norm(log_so3(R1) - log_so3(R2)))


def orthogonality_error(M: npt.ArrayLike) -> float:
    """Return ``||M^T M - I||_F``."""
    M = np.asarray(M, dtype=float)
    return float(np.linalg.norm(M.T @ M - IDENTITY))


def is_rotation(M: npt.ArrayLike, tol: float = ROTATION_TOL) -> bool:
    """Check orthogonality and unit determinant within ``tol``."""
    M = np.asarray(M, dtype=float)
    if M.shape != (3, 3) or not np.all(np.isfinite(M)):
        return False
    return orthogonality_error(M) <= tol and abs(float(np.linalg.det(M)) - 1.0) <= tol


def project_to_so3(M: npt.ArrayLike) -> Rotation:
    """Nearest rotation in Frobenius norm (orthogonal polar factor).

    极分解的正交因子，用于消除累积舍入误差。``det(M) <= 0`` 或秩亏时
    抛出 :class:`ManifoldError`。
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (3, 3) or not np.all(np.isfinite(M)):
        raise ManifoldError("projection needs a finite 3x3 matrix")
    singular_values = np.linalg.svd(M, compute_uv=False)
    if singular_values[0] == 0.0 or singular_values[-1] <= RANK_TOL * singular_values[0]:
        raise ManifoldError("cannot project a rank-deficient matrix onto SO(3)")
    if np.linalg.det(M) <= 0.0:
        raise ManifoldError("cannot project a matrix with non-positive determinant onto SO(3)")
    U, _ = scipy.linalg.polar(M, side="right")
    return U


def random_rotation(rng_seed: int | np.random.Generator | None, theta_max: float) -> Rotation:
    """Sample ``exp_so3(theta * u)`` with u uniform on the sphere.

    随机姿态：旋转轴在单位球面上均匀分布，旋转角在 ``(0, theta_max]``
    上均匀分布。给定种子时结果确定。
    """
    if not 0.0 < theta_max < math.pi:
        raise ValueError(f"theta_max must lie in (0, pi), got {theta_max}")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    axis = rng.standard_normal(3)
    norm = float(np.linalg.norm(axis))
    while norm < 1e-12:
        axis = rng.standard_normal(3)
        norm = float(np.linalg.norm(axis))
    # 1 - U lies in (0, 1] for U uniform on [0, 1)
    theta = theta_max * (1.0 - float(rng.random()))
    return exp_so3(theta * axis / norm)

"""Simulation configuration: types, parsing and validation.

配置文件为只含点分键的 TOML 文本，例如::

    controller = "ftt_geo"
    integrator.h = 1e-3
    init.seed = 7

未知键一律报错；缺省值集中定义在 :mod:`attitude_core.constants`。
"""

from __future__ import annotations

import dataclasses
import logging
import math
import re

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

import numpy as np

from .constants import (
    DEFAULT_ALPHA,
    DEFAULT_AMPLITUDE,
    DEFAULT_CONVERGENCE_THRESHOLD,
    DEFAULT_EPS_SWITCH,
    DEFAULT_FIT_WINDOW,
    DEFAULT_FREQUENCY,
    DEFAULT_METHOD,
    DEFAULT_PHASE,
    DEFAULT_REPROJECT_EVERY,
    DEFAULT_SAMPLE_EVERY,
    DEFAULT_SEED,
    DEFAULT_STEP,
    DEFAULT_T_FINAL,
    DEFAULT_THETA_MAX,
    INIT_MARGIN,
    LOG_LEVEL,
)
from .controllers import ControllerKind
from .errors import ParseError, ValidationError
from .integrator import IntegratorSpec, SimState
from .reference import ReferenceKind
from .so3 import exp_so3, random_rotation, relative_rotation, rotation_angle

logger = logging.getLogger(__name__)
logger.setLevel(LOG_LEVEL)


@dataclass(frozen=True)
class InitSpec:
    """Initial attitudes: random from a seed, or explicit axis-angle vectors.

    初始条件：随机（种子 + 最大相对角）或显式轴角向量。
    """

    seed: int = DEFAULT_SEED
    theta_max: float = DEFAULT_THETA_MAX
    rr: tuple[float, float, float] | None = None
    r1: tuple[float, float, float] | None = None

    @property
    def is_explicit(self) -> bool:
        return self.rr is not None


@dataclass(frozen=True)
class AnalysisSpec:
    """Settings for the convergence report."""

    threshold: float = DEFAULT_CONVERGENCE_THRESHOLD
    alpha: float = DEFAULT_ALPHA
    fit_start: float = DEFAULT_FIT_WINDOW[0]
    fit_end: float = DEFAULT_FIT_WINDOW[1]

    @property
    def fit_window(self) -> tuple[float, float]:
        return (self.fit_start, self.fit_end)


@dataclass(frozen=True)
class OutputSpec:
    """Optional output paths; command line flags take precedence."""

    csv: str | None = None
    report: str | None = None
    plot: str | None = None


@dataclass(frozen=True)
class SimConfig:
    """Full description of one closed-loop run.

    单次闭环仿真的完整描述。
    """

    controller: ControllerKind
    reference: ReferenceKind = field(default_factory=ReferenceKind.paper_sim)
    init: InitSpec = field(default_factory=InitSpec)
    integrator: IntegratorSpec = field(default_factory=IntegratorSpec)
    t_final: float = DEFAULT_T_FINAL
    sample_every: int = DEFAULT_SAMPLE_EVERY
    analysis: AnalysisSpec = field(default_factory=AnalysisSpec)
    output: OutputSpec = field(default_factory=OutputSpec)

    def initial_state(self) -> SimState:
        """Build the attitudes at ``t = 0``.

        随机初始化：由同一个随机数生成器先采样目标姿态，再采样相对旋转，
        使相对角落在 ``(0, theta_max]``。
        """
        if self.init.is_explicit:
            return SimState(0.0, exp_so3(self.init.rr), exp_so3(self.init.r1))
        rng = np.random.default_rng(self.init.seed)
        Rr = random_rotation(rng, math.pi - INIT_MARGIN)
        R1 = Rr @ random_rotation(rng, self.init.theta_max)
        return SimState(0.0, Rr, R1)

    def with_seed(self, seed: int) -> "SimConfig":
        return dataclasses.replace(self, init=dataclasses.replace(self.init, seed=int(seed)))


# dotted key -> expected value kind
_KEYS: dict[str, str] = {
    "controller": "str",
    "eps_switch": "float",
    "reference.kind": "str",
    "reference.amplitude": "vec3",
    "reference.frequency": "vec3",
    "reference.phase": "vec3",
    "init.seed": "int",
    "init.theta_max": "float",
    "init.explicit.rr": "vec3",
    "init.explicit.r1": "vec3",
    "integrator.method": "str",
    "integrator.h": "float",
    "integrator.reproject_every": "int",
    "t_final": "float",
    "sample_every": "int",
    "analysis.threshold": "float",
    "analysis.alpha": "float",
    "analysis.fit_start": "float",
    "analysis.fit_end": "float",
    "output.csv": "str",
    "output.report": "str",
    "output.plot": "str",
}


def _flatten(tree: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in tree.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(_flatten(value, dotted + "."))
        else:
            flat[dotted] = value
    return flat


def _line_of(text: str, key: str) -> int | None:
    leaf = re.escape(key.split(".")[-1])
    pattern = re.compile(rf"^\s*[\w.\"]*{leaf}\"?\s*=")
    for number, line in enumerate(text.splitlines(), start=1):
        if pattern.match(line):
            return number
    return None


def _coerce(key: str, value: Any, kind: str, text: str, source: str) -> Any:
    def fail(expected: str) -> ParseError:
        return ParseError(
            f"expected {expected}, got {type(value).__name__} {value!r}",
            source=source,
            line=_line_of(text, key),
            key=key,
        )

    if kind == "str":
        if not isinstance(value, str):
            raise fail("a string")
        return value
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise fail("an integer")
        return value
    if kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise fail("a number")
        return float(value)
    if not isinstance(value, list) or len(value) != 3:
        raise fail("a list of 3 numbers")
    if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value):
        raise fail("a list of 3 numbers")
    return tuple(float(v) for v in value)


def _guard(field_name: str, build: Callable[[], Any]) -> Any:
    try:
        return build()
    except ValueError as exc:
        if isinstance(exc, (ParseError, ValidationError)):
            raise
        raise ValidationError(field_name, str(exc)) from exc


def load_config_text(text: str, source: str = "<config>") -> SimConfig:
    """Parse configuration text into a validated :class:`SimConfig`."""
    try:
        tree = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        match = re.search(r"line (\d+)", str(exc))
        line = int(match.group(1)) if match else None
        raise ParseError(str(exc), source=source, line=line) from exc

    flat = _flatten(tree)
    values: dict[str, Any] = {}
    for key, value in flat.items():
        if key not in _KEYS:
            raise ParseError("unknown key", source=source, line=_line_of(text, key), key=key)
        values[key] = _coerce(key, value, _KEYS[key], text, source)

    if "controller" not in values:
        raise ParseError("missing required key", source=source, key="controller")

    controller = _guard(
        "controller",
        lambda: ControllerKind(values["controller"], values.get("eps_switch", DEFAULT_EPS_SWITCH)),
    )
    reference = _guard(
        "reference",
        lambda: ReferenceKind(
            values.get("reference.kind", "paper_sim"),
            amplitude=values.get("reference.amplitude", DEFAULT_AMPLITUDE),
            frequency=values.get("reference.frequency", DEFAULT_FREQUENCY),
            phase=values.get("reference.phase", DEFAULT_PHASE),
        ),
    )
    has_rr = "init.explicit.rr" in values
    has_r1 = "init.explicit.r1" in values
    if has_rr != has_r1:
        raise ValidationError("init.explicit", "both rr and r1 must be given for an explicit init")
    init = InitSpec(
        seed=values.get("init.seed", DEFAULT_SEED),
        theta_max=values.get("init.theta_max", DEFAULT_THETA_MAX),
        rr=values.get("init.explicit.rr"),
        r1=values.get("init.explicit.r1"),
    )
    integrator = _guard(
        "integrator",
        lambda: IntegratorSpec(
            method=values.get("integrator.method", DEFAULT_METHOD),
            h=values.get("integrator.h", DEFAULT_STEP),
            reproject_every=values.get("integrator.reproject_every", DEFAULT_REPROJECT_EVERY),
        ),
    )
    analysis = AnalysisSpec(
        threshold=values.get("analysis.threshold", DEFAULT_CONVERGENCE_THRESHOLD),
        alpha=values.get("analysis.alpha", DEFAULT_ALPHA),
        fit_start=values.get("analysis.fit_start", DEFAULT_FIT_WINDOW[0]),
        fit_end=values.get("analysis.fit_end", DEFAULT_FIT_WINDOW[1]),
    )
    output = OutputSpec(
        csv=values.get("output.csv"),
        report=values.get("output.report"),
        plot=values.get("output.plot"),
    )
    config = SimConfig(
        controller=controller,
        reference=reference,
        init=init,
        integrator=integrator,
        t_final=values.get("t_final", DEFAULT_T_FINAL),
        sample_every=values.get("sample_every", DEFAULT_SAMPLE_EVERY),
        analysis=analysis,
        output=output,
    )
    validate_config(config)
    return config


def parse_config(path: str | Path) -> SimConfig:
    """Read and validate a configuration file.

    读取并校验配置文件。语法/类型/未知键错误抛出 :class:`ParseError`，
    违反约束抛出 :class:`ValidationError`。
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    config = load_config_text(text, source=str(path))
    logger.debug("Loaded config %s: %s", path, config.controller.tag)
    return config


def validate_config(config: SimConfig) -> None:
    """Check the invariants of a :class:`SimConfig`."""
    if not (config.t_final > 0.0 and math.isfinite(config.t_final)):
        raise ValidationError("t_final", f"must be positive and finite, got {config.t_final}")
    if config.sample_every < 1:
        raise ValidationError("sample_every", f"must be >= 1, got {config.sample_every}")
    init = config.init
    if init.seed < 0:
        raise ValidationError("init.seed", f"must be non-negative, got {init.seed}")
    if init.is_explicit:
        if init.r1 is None:
            raise ValidationError("init.explicit", "both rr and r1 must be given for an explicit init")
        theta = rotation_angle(relative_rotation(exp_so3(init.rr), exp_so3(init.r1)))
        if theta >= math.pi - INIT_MARGIN:
            raise ValidationError(
                "init.explicit",
                f"relative angle {theta:.6f} must be below pi - {INIT_MARGIN:g}",
            )
    elif not 0.0 < init.theta_max < math.pi:
        raise ValidationError("init.theta_max", f"must lie in (0, pi), got {init.theta_max}")
    analysis = config.analysis
    if analysis.threshold <= 10.0 * config.controller.eps_switch:
        raise ValidationError(
            "analysis.threshold",
            f"must exceed 10 * eps_switch = {10.0 * config.controller.eps_switch:g}",
        )
    if analysis.alpha <= 0.5:
        raise ValidationError("analysis.alpha", f"must be greater than 1/2, got {analysis.alpha}")
    if not 0.0 <= analysis.fit_start < analysis.fit_end:
        raise ValidationError(
            "analysis.fit_start",
            f"fit window must satisfy 0 <= start < end, got ({analysis.fit_start}, {analysis.fit_end})",
        )


def with_overrides(
    config: SimConfig,
    controller: str | None = None,
    seed: int | None = None,
    t_final: float | None = None,
    dt: float | None = None,
) -> SimConfig:
    """Apply command line overrides and validate the result."""
    updated = config
    if controller is not None:
        kind = _guard("controller", lambda: ControllerKind(controller, config.controller.eps_switch))
        updated = dataclasses.replace(updated, controller=kind)
    if seed is not None:
        updated = updated.with_seed(seed)
    if t_final is not None:
        updated = dataclasses.replace(updated, t_final=float(t_final))
    if dt is not None:
        spec = _guard("integrator.h", lambda: dataclasses.replace(updated.integrator, h=float(dt)))
        updated = dataclasses.replace(updated, integrator=spec)
    validate_config(updated)
    return updated

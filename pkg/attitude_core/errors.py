"""Exception types raised by the simulator.

仿真器使用的异常类型。输入类错误继承 ``ValueError``，运行期数值错误继承
``RuntimeError``，便于调用方按类别捕获。
"""

from __future__ import annotations


class ManifoldError(ValueError):
    """Input matrix is not an element of SO(3) or so(3)."""


class SingularityError(ValueError):
    """Relative attitude reached the rotation-angle-pi set.

    相对姿态到达 theta = pi 奇异集，主对数与控制律在此无定义。
    """

    def __init__(self, message: str, theta: float | None = None, time: float | None = None) -> None:
        super().__init__(message)
        self.theta = theta
        self.time = time

    def at_time(self, time: float) -> "SingularityError":
        """Return a copy carrying the simulation time of the failure."""
        return SingularityError(f"{self.args[0]} (t = {time:.6g} s)", theta=self.theta, time=time)


class StepError(RuntimeError):
    """Integration produced a non-finite value."""

    def __init__(self, message: str, time: float | None = None) -> None:
        super().__init__(message)
        self.time = time


class ParseError(ValueError):
    """Configuration text could not be read.

    配置文件语法、类型或未知键错误，携带来源、行号与键名。
    """

    def __init__(
        self,
        message: str,
        source: str | None = None,
        line: int | None = None,
        key: str | None = None,
    ) -> None:
        context = []
        if source:
            context.append(str(source))
        if line is not None:
            context.append(f"line {line}")
        if key:
            context.append(f"key '{key}'")
        prefix = f"{', '.join(context)}: " if context else ""
        super().__init__(prefix + message)
        self.source = source
        self.line = line
        self.key = key


class ValidationError(ValueError):
    """Configuration is well formed but violates an invariant."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


class AnalysisError(ValueError):
    """Recorded trajectory does not hold enough data for an analysis."""

"""Attitude tracking simulator core modules.

刚体姿态跟踪仿真核心模块。

Structure overview:

```
so3          -> SO(3) 指数/对数映射与度量
reference    -> 参考角速度生成
controllers  -> 四种跟踪控制律
integrator   -> Lie 群积分与仿真循环
analysis     -> 收敛性分析与报告
config       -> 配置解析与校验
```
"""

from .so3 import (
    hat,
    vee,
    exp_so3,
    log_so3,
    rotation_angle,
    dist_frobenius,
    dist_geodesic,
    dist_hyperbolic,
    project_to_so3,
    random_rotation,
)
from .reference import ReferenceKind, sample
from .controllers import ControllerKind, ControlOutput, control
from .integrator import IntegratorSpec, SimState, TrajectoryRecord, simulate, step
from .analysis import (
    ConvergenceReport,
    analyze_trajectory,
    check_theta_monotone,
    detect_convergence_time,
    fit_exponential_rate,
    lyapunov_frobenius,
    lyapunov_geodesic,
)
from .config import SimConfig, parse_config, load_config_text, with_overrides
# Exception types 异常类型
from .errors import (
    AnalysisError,
    ManifoldError,
    ParseError,
    SingularityError,
    StepError,
    ValidationError,
)

# Re-export commonly used symbols for convenience 便于外部使用

__all__ = [
    "hat",                    # 向量 -> 反对称矩阵
    "vee",                    # 反对称矩阵 -> 向量
    "exp_so3",                # 指数映射
    "log_so3",                # 主对数
    "rotation_angle",         # 旋转角
    "dist_frobenius",         # Frobenius 距离
    "dist_geodesic",          # 测地距离
    "dist_hyperbolic",        # 双曲距离
    "project_to_so3",         # 重新正交化
    "random_rotation",        # 随机姿态
    "ReferenceKind",          # 参考信号类型
    "sample",                 # 参考角速度采样
    "ControllerKind",         # 控制律类型
    "ControlOutput",          # 控制输出
    "control",                # 控制律计算
    "IntegratorSpec",         # 积分设置
    "SimState",               # 闭环状态
    "TrajectoryRecord",       # 轨迹采样点
    "simulate",               # 仿真主循环
    "step",                   # 单步推进
    "ConvergenceReport",      # 收敛报告
    "analyze_trajectory",     # 轨迹分析
    "check_theta_monotone",   # 相对角单调性
    "detect_convergence_time",# 收敛时刻检测
    "fit_exponential_rate",   # 指数速率拟合
    "lyapunov_frobenius",     # Frobenius Lyapunov 函数
    "lyapunov_geodesic",      # 测地 Lyapunov 函数
    "SimConfig",              # 仿真配置
    "parse_config",           # 读取配置文件
    "load_config_text",       # 解析配置文本
    "with_overrides",         # 命令行覆盖
    "AnalysisError",
    "ManifoldError",
    "ParseError",
    "SingularityError",
    "StepError",
    "ValidationError",
]

"""Common constants for the attitude tracking simulator.

这个文件集中定义系统使用的常量，便于统一管理。"""

import math
import os

# Absolute path to the package 用于定位示例配置文件的绝对路径
BASE_DIR = os.path.dirname(os.path.abspath(__file__))

# Example configuration shipped with the repository 示例配置文件
DEFAULT_CONFIG_PATH = os.path.join(BASE_DIR, "..", "data", "tracking_asy_geo.toml")

# Logging level 日志级别
LOG_LEVEL = os.environ.get("LOG_LEVEL", "INFO").upper()

# Controller tags 四种控制律
# asy_* 渐近跟踪, ftt_* 有限时间跟踪; *_geo 测地差, *_fro Frobenius 差
CONTROLLER_TAGS = ("asy_geo", "ftt_geo", "asy_fro", "ftt_fro")

# Reference velocity generators 参考角速度类型
REFERENCE_TAGS = ("paper_sim", "constant", "sinusoid", "zero")

# Integration schemes 积分方法
INTEGRATOR_METHODS = ("lie_euler", "lie_rk4")

# Threshold below which exp/log coefficients switch to Taylor series
# 指数/对数映射在小角度下改用泰勒级数的阈值
SERIES_THRESHOLD = 1e-4

# Distance to theta = pi at which the principal logarithm is refused
# 主对数在 theta 接近 pi 时拒绝计算的裕度
LOG_DELTA = 1e-6

# Explicit initial conditions must stay this far away from theta = pi
# 显式初始条件与奇异集之间的最小裕度
INIT_MARGIN = 1e-3

# Tolerances used when checking membership of SO(3) / so(3)
# SO(3) 与 so(3) 成员检查的容差
ROTATION_TOL = 1e-9
SKEW_TOL = 1e-6

# Relative singular value under which a matrix counts as rank deficient
RANK_TOL = 1e-12

# Switching radius of the finite-time laws, in metric units
# 有限时间控制律的切换半径（度量单位）
DEFAULT_EPS_SWITCH = 1e-9

# Integrator defaults 积分器默认参数
DEFAULT_STEP = 1e-3
DEFAULT_T_FINAL = 10.0
DEFAULT_SAMPLE_EVERY = 10
DEFAULT_REPROJECT_EVERY = 1000
DEFAULT_METHOD = "lie_euler"

# Random initialisation 随机初始化
DEFAULT_SEED = 0
DEFAULT_THETA_MAX = 3.0

# Default reference parameters (used by constant / sinusoid) 参考信号默认参数
DEFAULT_AMPLITUDE = (1.0, 1.0, 1.0)
DEFAULT_FREQUENCY = (1.0, 1.0, 1.0)
DEFAULT_PHASE = (0.0, 0.0, 0.0)

# Analysis defaults 分析模块默认参数
DEFAULT_CONVERGENCE_THRESHOLD = 1e-6
DEFAULT_ALPHA = 1.0
DEFAULT_FIT_WINDOW = (0.1, 5.0)
MONOTONE_TOL = 1e-6
W_FLOOR = 1e-14
MIN_FIT_SAMPLES = 10

# Frobenius distance between antipodal attitudes, the upper bound of d_F
MAX_FROBENIUS = 2.0 * math.sqrt(2.0)

# Batch concurrency 批量运行的并发数
DEFAULT_MAX_WORKERS = int(os.environ.get("ATTITUDE_MAX_WORKERS", "4"))

# CSV layout 轨迹文件列
CSV_HEADER = (
    "t",
    "Rr11", "Rr12", "Rr13", "Rr21", "Rr22", "Rr23", "Rr31", "Rr32", "Rr33",
    "R111", "R112", "R113", "R121", "R122", "R123", "R131", "R132", "R133",
    "theta", "d_R", "d_F", "W", "omega1_norm", "regularized",
)

# 17 significant digits round-trip IEEE doubles exactly
FLOAT_FORMAT = ".17g"

# Batch summary columns 批量汇总表的列
SUMMARY_HEADER = (
    "seed",
    "theta0",
    "convergence_time",
    "fitted_rate",
    "singularity_hit",
    "theta_monotone",
    "error",
)

# Fixed salt so SVG element ids do not change between runs
SVG_HASH_SALT = "attitude-tracking"

# Process exit codes 进程退出码
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_SINGULARITY = 3
EXIT_IO_ERROR = 4

"""
日志输出工具模块

Provides one logging setup for all entry points and the indented
"details" block used for run start and run summary messages.
"""

import logging
import sys
from typing import Any, Dict, Optional

from .constants import LOG_LEVEL

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def configure_logging(level: str | int = LOG_LEVEL, log_file: Optional[str] = None) -> None:
    """Configure root logging for command line entry points.

    为命令行入口配置统一的日志格式，可选同时写入日志文件。
    """
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        datefmt=DATE_FORMAT,
        handlers=handlers,
        force=True,
    )


def format_details(message: str, details: Optional[Dict[str, Any]] = None) -> str:
    """Render a headline followed by indented ``key: value`` lines."""
    if not details:
        return message
    width = max(len(str(key)) for key in details)
    lines = [message]
    for key, value in details.items():
        lines.append(f"    {str(key):<{width}} : {value}")
    return "\n".join(lines)


def log_details(
    logger: logging.Logger,
    message: str,
    details: Optional[Dict[str, Any]] = None,
    level: int = logging.INFO,
) -> None:
    """Log ``message`` with a details block at ``level``."""
    if logger.isEnabledFor(level):
        logger.log(level, format_details(message, details))


def format_run_details(config) -> Dict[str, Any]:
    """格式化单次仿真的关键参数"""
    init = config.init
    if init.is_explicit:
        init_text = f"explicit rr={list(init.rr)} r1={list(init.r1)}"
    else:
        init_text = f"random seed={init.seed} theta_max={init.theta_max}"
    return {
        "controller": config.controller.tag,
        "eps_switch": config.controller.eps_switch,
        "reference": config.reference.tag,
        "init": init_text,
        "integrator": f"{config.integrator.method} h={config.integrator.h}",
        "t_final": config.t_final,
        "sample_every": config.sample_every,
    }

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
统一的日志记录模块，提供调试和错误日志功能
"""

import os
import sys
import logging
import inspect
import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

# 日志级别映射
LOG_LEVELS = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
    "CRITICAL": logging.CRITICAL,
}

# 默认配置
DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
DEFAULT_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# 彩色日志配置
COLORS = {
    "DEBUG": "\033[36m",  # 青色
    "INFO": "\033[32m",  # 绿色
    "WARNING": "\033[33m",  # 黄色
    "ERROR": "\033[31m",  # 红色
    "CRITICAL": "\033[35m",  # 紫色
    "RESET": "\033[0m",
}

# 全局日志记录器字典
loggers: Dict[str, logging.Logger] = {}

# attach_file_handler 挂上的文件处理器
_file_handlers: List[logging.Handler] = []


class ColoredFormatter(logging.Formatter):
    """只在终端输出时给级别名加颜色"""

    def format(self, record):
        levelname = record.levelname
        if levelname in COLORS and sys.stderr.isatty():
            record.levelname = f"{COLORS[levelname]}{levelname}{COLORS['RESET']}"
        result = super().format(record)
        record.levelname = levelname
        return result


def _env_level() -> int:
    level_name = os.environ.get("SOR_LOG_LEVEL", DEFAULT_LOG_LEVEL).upper()
    return LOG_LEVELS.get(level_name, logging.INFO)


def _caller_module() -> str:
    # 跳过 _caller_module 自身和 debug/info 等包装函数
    frame = inspect.currentframe()
    try:
        caller = frame.f_back.f_back if frame and frame.f_back else None
        if caller is not None:
            return caller.f_globals.get("__name__", "sor_mql")
        return "sor_mql"
    finally:
        del frame


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """
    获取或创建一个命名的日志记录器

    Args:
        name: 日志记录器名称，默认使用调用者的模块名

    Returns:
        logging.Logger: 配置好的日志记录器
    """
    if name is None:
        frame = inspect.currentframe()
        try:
            caller = frame.f_back if frame else None
            name = caller.f_globals.get("__name__", "sor_mql") if caller else "sor_mql"
        finally:
            del frame

    if name in loggers:
        return loggers[name]

    logger = logging.getLogger(name)
    log_level = _env_level()

    if not logger.handlers:
        logger.setLevel(log_level)

        # 日志写到 stderr，stdout 留给 JSON / CSV 结果
        handler = logging.StreamHandler(sys.stderr)
        handler.setLevel(log_level)
        log_format = os.environ.get("SOR_LOG_FORMAT", DEFAULT_LOG_FORMAT)
        date_format = os.environ.get("SOR_LOG_DATE_FORMAT", DEFAULT_DATE_FORMAT)
        handler.setFormatter(ColoredFormatter(log_format, date_format))
        logger.addHandler(handler)
        logger.propagate = False

    for file_handler in _file_handlers:
        if file_handler not in logger.handlers:
            logger.addHandler(file_handler)

    loggers[name] = logger
    return logger


def set_level(level: Union[int, str]) -> None:
    """把所有已注册的日志记录器（及其处理器）调整到同一级别"""
    if isinstance(level, str):
        level = LOG_LEVELS.get(level.upper(), logging.INFO)
    for logger in loggers.values():
        logger.setLevel(level)
        for handler in logger.handlers:
            if isinstance(handler, logging.FileHandler):
                continue
            handler.setLevel(level)


def enable_debug_mode() -> None:
    """--debug 开关：设置环境变量并把级别降到 DEBUG"""
    os.environ["SOR_DEBUG_MODE"] = "1"
    os.environ["SOR_LOG_LEVEL"] = "DEBUG"
    set_level(logging.DEBUG)


def is_debug_mode() -> bool:
    """
    检查是否处于调试模式

    Returns:
        bool: 是否启用了调试模式
    """
    return (
        os.environ.get("SOR_DEBUG_MODE") == "1"
        or os.environ.get("SOR_LOG_LEVEL", "").upper() == "DEBUG"
    )


def attach_file_handler(path: Union[str, Path]) -> logging.Handler:
    """
    给运行目录追加一个 run.log 文件处理器

    每个模块的记录器都不向上传递，所以处理器要挂到所有已注册和之后新建的记录器上。

    Args:
        path: 日志文件路径

    Returns:
        logging.Handler: 新建的处理器，运行结束后交给 detach_file_handler
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path, mode="w", encoding="utf-8")
    handler.setLevel(_env_level())
    handler.setFormatter(logging.Formatter(DEFAULT_LOG_FORMAT, DEFAULT_DATE_FORMAT))
    _file_handlers.append(handler)
    for logger in loggers.values():
        logger.addHandler(handler)
    return handler


def detach_file_handler(handler: logging.Handler) -> None:
    """移除并关闭 attach_file_handler 创建的处理器"""
    if handler in _file_handlers:
        _file_handlers.remove(handler)
    for logger in loggers.values():
        logger.removeHandler(handler)
    handler.close()


def debug(msg: Any, *args, **kwargs):
    """记录调试级别的消息"""
    get_logger(_caller_module()).debug(msg, *args, **kwargs)


def error(msg: Any, *args, **kwargs):
    """记录错误级别的消息"""
    get_logger(_caller_module()).error(msg, *args, **kwargs)


def log_function_call(func):
    """
    函数装饰器，调试模式下记录函数调用的参数、返回值和耗时

    Args:
        func: 被装饰的函数

    Returns:
        装饰后的函数
    """

    def wrapper(*args, **kwargs):
        logger = get_logger(func.__module__)
        debug_on = is_debug_mode()

        if debug_on:
            arg_str = ", ".join(repr(a)[:80] for a in args)
            kwarg_str = ", ".join(f"{k}={repr(v)[:80]}" for k, v in kwargs.items())
            all_args = ", ".join(filter(None, [arg_str, kwarg_str]))
            logger.debug(f"调用 {func.__name__}({all_args})")
            start_time = datetime.datetime.now()

        try:
            result = func(*args, **kwargs)
        except Exception as e:
            logger.error(f"{func.__name__} 抛出异常: {e}")
            raise

        if debug_on:
            duration = (datetime.datetime.now() - start_time).total_seconds()
            logger.debug(
                f"{func.__name__} 返回: {repr(result)[:200]} (执行时间: {duration:.6f}秒)"
            )
        return result

    wrapper.__name__ = func.__name__
    wrapper.__qualname__ = getattr(func, "__qualname__", func.__name__)
    wrapper.__doc__ = func.__doc__
    wrapper.__module__ = func.__module__
    wrapper.__wrapped__ = func
    return wrapper

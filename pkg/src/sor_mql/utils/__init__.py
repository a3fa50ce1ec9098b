#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
工具函数包：日志与终端报告
"""

from .logger import (
    attach_file_handler,
    detach_file_handler,
    enable_debug_mode,
    get_logger,
    is_debug_mode,
    log_function_call,
    set_level,
)
from .terminal import format_table, get_string_display_width, get_terminal_size, print_with_borders

__all__ = [
    "attach_file_handler",
    "detach_file_handler",
    "enable_debug_mode",
    "format_table",
    "get_logger",
    "get_string_display_width",
    "get_terminal_size",
    "is_debug_mode",
    "log_function_call",
    "print_with_borders",
    "set_level",
]

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
命令行接口包
"""

from .main import dispatch, main
from .parser import build_parser, config_overrides, parse_args

__all__ = ["build_parser", "config_overrides", "dispatch", "main", "parse_args"]

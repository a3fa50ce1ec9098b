#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
终端报告输出的辅助函数
"""

import os
import sys
from typing import List, Sequence, TextIO, Optional


def get_terminal_size():
    """获取终端窗口大小，拿不到时返回 80x24"""
    try:
        size = os.get_terminal_size()
        return size.columns, size.lines
    except OSError:
        return 80, 24


def get_string_display_width(s: str) -> int:
    """获取字符串在终端中的显示宽度，中文等宽字符按 2 计"""
    width = 0
    for char in s:
        if ord(char) > 127:
            width += 2
        else:
            width += 1
    return width


def _pad(text: str, width: int) -> str:
    return text + " " * max(0, width - get_string_display_width(text))


def format_table(header: Sequence[str], rows: Sequence[Sequence[object]]) -> List[str]:
    """把表头和行格式化为左对齐的文本行

    Args:
        header: 列名
        rows: 每行的单元格，会用 str() 转换

    Returns:
        list: 文本行（表头、分隔线、数据行）
    """
    cells = [[str(c) for c in header]] + [[str(c) for c in row] for row in rows]
    widths = [0] * len(header)
    for row in cells:
        for j, cell in enumerate(row):
            widths[j] = max(widths[j], get_string_display_width(cell))

    lines = ["  ".join(_pad(cell, widths[j]) for j, cell in enumerate(cells[0])).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in cells[1:]:
        lines.append("  ".join(_pad(cell, widths[j]) for j, cell in enumerate(row)).rstrip())
    return lines


def print_with_borders(title: str, lines: Sequence[str], stream: Optional[TextIO] = None):
    """带边框打印一段报告

    Args:
        title: 标题行
        lines: 正文行，超出终端宽度的行会被截断
        stream: 输出流，默认 stdout
    """
    stream = stream or sys.stdout
    terminal_width, _ = get_terminal_size()
    content = [title] + list(lines)
    inner = max(get_string_display_width(line) for line in content)
    inner = min(inner, max(20, terminal_width - 4))

    def clip(line: str) -> str:
        while get_string_display_width(line) > inner:
            line = line[:-1]
        return line

    horizontal_border = "─" * (inner + 2)
    print(f"┌{horizontal_border}┐", file=stream)
    print(f"│ {_pad(clip(title), inner)} │", file=stream)
    print(f"├{horizontal_border}┤", file=stream)
    for line in lines:
        print(f"│ {_pad(clip(line), inner)} │", file=stream)
    print(f"└{horizontal_border}┘", file=stream)

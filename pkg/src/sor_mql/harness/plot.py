#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
把若干 CSV 中的同名字段画成一张 SVG 曲线图

SVG 输出固定了哈希盐和字体方式，并去掉日期与生成器元数据，同样的输入得到逐字节相同的文件。
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

from matplotlib.figure import Figure  # noqa: E402

from ..errors import DimensionMismatch, EmptySeries  # noqa: E402
from ..utils.logger import get_logger  # noqa: E402
from .io import read_csv, read_columns  # noqa: E402

logger = get_logger(__name__)

SVG_RC = {
    "svg.hashsalt": "sor-mql",
    "svg.fonttype": "none",
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
}
FIGURE_SIZE = (6.4, 4.0)


def run_settings(path: Path) -> Dict[str, Any]:
    """CSV 旁边运行目录里的 config.json，不存在时为空"""
    config_path = Path(path).parent / "config.json"
    if not config_path.exists():
        return {}
    try:
        with open(config_path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError:
        logger.warning(f"忽略无法解析的 {config_path}")
        return {}
    return data if isinstance(data, dict) else {}


def series_label(path: Path) -> str:
    """图例 (算法, w)

    CSV 中的 algorithm / w 列优先，其次是同目录 config.json，最后退回目录名。
    """
    path = Path(path)
    _, header, rows = read_csv(path)
    settings = run_settings(path)
    if rows and "algorithm" in header:
        algorithm = rows[0]["algorithm"]
    else:
        algorithm = settings.get("algorithm") or path.parent.name or path.stem
    if rows and "w" in header:
        w = rows[0]["w"]
    else:
        w = settings.get("w")
    if w is None:
        return str(algorithm)
    return f"{algorithm}, w={float(w):g}"


def emit_plot(
    csv_paths: Sequence[Path],
    x_field: str,
    y_field: str,
    out_svg: Path,
    labels: Optional[Sequence[str]] = None,
    title: Optional[str] = None,
) -> Path:
    """每个 CSV 一条折线，坐标轴标签取字段名

    Raises:
        MissingColumn: 某个 CSV 缺少 x 或 y 字段
        EmptySeries: 没有输入，或某个 CSV 没有数据行
    """
    paths = [Path(p) for p in csv_paths]
    if not paths:
        raise EmptySeries("没有要绘制的 CSV")
    if labels is not None and len(labels) != len(paths):
        raise DimensionMismatch("labels 的个数必须与 CSV 个数一致")
    series = [read_columns(p, [x_field, y_field]) for p in paths]
    names: List[str] = list(labels) if labels is not None else [series_label(p) for p in paths]

    with matplotlib.rc_context(SVG_RC):
        fig = Figure(figsize=FIGURE_SIZE)
        ax = fig.add_subplot(1, 1, 1)
        for i, (data, name) in enumerate(zip(series, names)):
            (line,) = ax.plot(data[x_field], data[y_field], linewidth=1.0, label=name)
            line.set_gid(f"series-{i}")
        ax.set_xlabel(x_field)
        ax.set_ylabel(y_field)
        if title:
            ax.set_title(title)
        ax.legend(loc="best", frameon=False)
        fig.tight_layout()

        out_svg = Path(out_svg)
        out_svg.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out_svg, format="svg", metadata={"Date": None, "Creator": None})
    logger.info(f"写出图像 {out_svg}")
    return out_svg

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
带配置指纹的 CSV 读写

每个 CSV 的第一行是 "# fingerprint: <16 位十六进制>"，第二行是表头。
浮点数用 repr 写出，保证同一配置重复运行得到逐字节相同的文件。
"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..errors import DimensionMismatch, EmptySeries, MissingColumn, OutputExists
from ..utils.logger import get_logger

logger = get_logger(__name__)

FINGERPRINT_PREFIX = "# fingerprint: "


def _format(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def read_fingerprint(path: Path) -> Optional[str]:
    """读取 CSV 首行的指纹，没有则返回 None"""
    path = Path(path)
    if not path.exists():
        return None
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline().rstrip("\n")
    if first.startswith(FINGERPRINT_PREFIX):
        return first[len(FINGERPRINT_PREFIX):].strip()
    return None


def check_output(path: Path, fingerprint: str, force: bool = False) -> None:
    """同指纹的已有文件只有 force 时才允许覆盖；指纹不同时警告后覆盖"""
    existing = read_fingerprint(path)
    if existing is None:
        return
    if existing == fingerprint and not force:
        raise OutputExists(f"{path} 已由相同配置生成（指纹 {fingerprint}），使用 --force 覆盖")
    if existing != fingerprint:
        logger.warning(f"{path} 的指纹 {existing} 与当前配置 {fingerprint} 不同，将被覆盖")


def write_csv(
    path: Path,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    fingerprint: str,
    force: bool = False,
) -> Path:
    """写出带指纹注释行的 CSV"""
    path = Path(path)
    check_output(path, fingerprint, force)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"{FINGERPRINT_PREFIX}{fingerprint}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(v) for v in row])
    logger.debug(f"写出 {path}")
    return path


def write_dict_rows(path: Path, columns: Sequence[str], rows: Iterable[Mapping[str, Any]], fingerprint: str, force: bool = False) -> Path:
    return write_csv(path, columns, ([row[c] for c in columns] for row in rows), fingerprint, force)


def read_csv(path: Path) -> Tuple[Optional[str], List[str], List[Dict[str, str]]]:
    """返回 (指纹, 表头, 行字典列表)，跳过 # 开头的注释行"""
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        lines = f.read().splitlines()
    fingerprint = None
    if lines and lines[0].startswith(FINGERPRINT_PREFIX):
        fingerprint = lines[0][len(FINGERPRINT_PREFIX):].strip()
    body = [line for line in lines if not line.startswith("#")]
    if not body:
        return fingerprint, [], []
    reader = csv.DictReader(body)
    rows = list(reader)
    return fingerprint, list(reader.fieldnames or []), rows


def read_columns(path: Path, fields: Sequence[str]) -> Dict[str, np.ndarray]:
    """把指定列读成浮点数组

    Raises:
        MissingColumn: 列不存在
        EmptySeries: 没有数据行
    """
    _, header, rows = read_csv(path)
    missing = [f for f in fields if f not in header]
    if missing:
        raise MissingColumn(f"{path} 缺少列 {missing}，已有 {header}")
    if not rows:
        raise EmptySeries(f"{path} 没有数据行")
    return {f: np.array([float(r[f]) for r in rows]) for f in fields}


def write_json(path: Path, data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")
    return path


def write_jsonl(path: Path, records: Iterable[Mapping[str, Any]]) -> Path:
    """每条记录一行 JSON"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, sort_keys=True, ensure_ascii=False))
            f.write("\n")
    return path


def read_payoff_csv(path: Path) -> np.ndarray:
    """读取收益矩阵 CSV：行是最大化方的动作，忽略 # 开头的行"""
    try:
        q = np.loadtxt(Path(path), delimiter=",", comments="#", ndmin=2)
    except ValueError as e:
        raise DimensionMismatch(f"{path} 不是规则的数值矩阵: {e}") from None
    if q.size == 0:
        raise DimensionMismatch(f"{path} 是空矩阵")
    return q

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
w 的消融扫描：每个 (w, seed) 一次独立运行，汇总为均值 ± 标准差
"""

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence, Tuple

import numpy as np

from ..config import fingerprint, save_config, seed_list
from ..errors import ConfigError, SorError
from ..utils.logger import get_logger, log_function_call
from .io import check_output, read_csv, write_csv, write_json
from .runs import ALGORITHMS, METRIC_NAMES, metric_from_csv, run_algorithm

logger = get_logger(__name__)

SOR_LABELS = {
    "tabular-vi": "SOR-VI",
    "tabular-ql": "SOR-MQL",
    "linear-fa": "SOR-LFA",
    "deep": "D-SOR-MQL",
}
RUN_COLUMNS = ("w", "seed", "status", "metric", "run_dir", "message")
SUMMARY_COLUMNS = ("label", "w", "metric", "mean", "std", "n_ok", "n_failed")


@dataclass(frozen=True)
class ExperimentConfig:
    """一次扫描的完整设置，config 是已解析的扁平配置"""

    algorithm: str
    w_list: Tuple[float, ...]
    seeds: Tuple[int, ...]
    out: Path
    config: Mapping[str, Any]

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"不支持的算法: {self.algorithm}")
        if not self.w_list or not self.seeds:
            raise ConfigError("w 列表与种子列表都不能为空")

    @classmethod
    def from_config(cls, config: Mapping[str, Any]) -> "ExperimentConfig":
        return cls(
            algorithm=config["algorithm"],
            w_list=tuple(float(w) for w in config["w_list"]),
            seeds=tuple(seed_list(config)),
            out=Path(config["out"]),
            config=dict(config),
        )

    def run_dir(self, w: float, seed: int) -> Path:
        return self.out / f"{self.algorithm}-w{w:g}-seed{seed}"


@dataclass(frozen=True)
class RunSummary:
    """单个 w 的汇总行，std 为总体标准差"""

    label: str
    w: float
    metric: str
    mean: float
    std: float
    n_ok: int
    n_failed: int

    def row(self) -> Tuple[Any, ...]:
        return tuple(asdict(self)[c] for c in SUMMARY_COLUMNS)


@dataclass(frozen=True)
class SweepResult:
    summaries: List[RunSummary]
    cells: List[Dict[str, Any]]


def label_for(algorithm: str, w: float) -> str:
    return "baseline" if w == 1.0 else SOR_LABELS[algorithm]


def run_cell(task: Tuple[Mapping[str, Any], float, int, str, bool]) -> Dict[str, Any]:
    """执行一个 (w, seed) 单元；失败记录在结果里，不向外抛出"""
    config, w, seed, run_dir, force = task
    cell_config = dict(config, w=w, seed=seed)
    start = time.perf_counter()
    try:
        metric = run_algorithm(cell_config, seed, Path(run_dir), force)
        status, message = "ok", ""
    except SorError as e:
        metric, status, message = float("nan"), "failed", f"{type(e).__name__}: {e}"
        logger.error(f"w={w:g} seed={seed} 运行失败: {message}")
    except Exception as e:
        metric, status, message = float("nan"), "failed", f"{type(e).__name__}: {e}"
        logger.error(f"w={w:g} seed={seed} 运行异常: {message}", exc_info=True)
    return {
        "w": w,
        "seed": seed,
        "status": status,
        "metric": metric,
        "run_dir": Path(run_dir).name,
        "message": message,
        "wall_clock": time.perf_counter() - start,
    }


def summarize(algorithm: str, cells: Sequence[Mapping[str, Any]]) -> List[RunSummary]:
    """按 w 出现的顺序分组，统计成功单元的均值与标准差"""
    order: List[float] = []
    groups: Dict[float, List[Mapping[str, Any]]] = {}
    for cell in cells:
        w = float(cell["w"])
        if w not in groups:
            order.append(w)
            groups[w] = []
        groups[w].append(cell)

    summaries = []
    for w in order:
        values = [float(c["metric"]) for c in groups[w] if c["status"] == "ok"]
        n_failed = len(groups[w]) - len(values)
        mean = float(np.mean(values)) if values else float("nan")
        std = float(np.std(values)) if values else float("nan")
        summaries.append(RunSummary(label_for(algorithm, w), w, METRIC_NAMES[algorithm], mean, std, len(values), n_failed))
    return summaries


@log_function_call
def run_sweep(exp: ExperimentConfig, jobs: int = 1, force: bool = False) -> SweepResult:
    """对每个 (w, seed) 独立运行，写出 runs.csv、summary.csv、timing.json 与 config.json"""
    fp = fingerprint(exp.config)
    check_output(exp.out / "summary.csv", fp, force)
    tasks = [
        (exp.config, w, seed, str(exp.run_dir(w, seed)), force)
        for w in exp.w_list
        for seed in exp.seeds
    ]
    logger.info(f"扫描 {exp.algorithm}: {len(exp.w_list)} 个 w x {len(exp.seeds)} 个种子，{jobs} 个进程")

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(run_cell, tasks))
    else:
        cells = [run_cell(task) for task in tasks]

    summaries = summarize(exp.algorithm, cells)
    write_csv(
        exp.out / "runs.csv",
        RUN_COLUMNS,
        ([c[k] for k in RUN_COLUMNS] for c in cells),
        fp,
        True,
    )
    write_csv(exp.out / "summary.csv", SUMMARY_COLUMNS, (s.row() for s in summaries), fp, force)
    write_json(
        exp.out / "timing.json",
        [{"w": c["w"], "seed": c["seed"], "wall_clock": c["wall_clock"]} for c in cells],
    )
    save_config(exp.config, exp.out / "config.json")
    failed = sum(1 for c in cells if c["status"] != "ok")
    if failed:
        logger.warning(f"{failed} 个单元运行失败，详见 runs.csv")
    return SweepResult(summaries, cells)


def summarize_from_csv(out_dir: Path) -> List[RunSummary]:
    """只读磁盘上的 runs.csv 与各运行目录的原始 CSV，重新计算汇总"""
    out_dir = Path(out_dir)
    algorithm = _read_algorithm(out_dir)
    _, _, rows = read_csv(out_dir / "runs.csv")
    cells = []
    for row in rows:
        cell: Dict[str, Any] = {"w": float(row["w"]), "seed": int(row["seed"]), "status": row["status"]}
        if row["status"] == "ok":
            cell["metric"] = metric_from_csv(algorithm, out_dir / row["run_dir"], cell["seed"])
        else:
            cell["metric"] = float("nan")
        cells.append(cell)
    return summarize(algorithm, cells)


def _read_algorithm(out_dir: Path) -> str:
    with open(out_dir / "config.json", "r", encoding="utf-8") as f:
        return json.load(f)["algorithm"]


def read_summary(out_dir: Path) -> List[RunSummary]:
    """读取 summary.csv"""
    _, _, rows = read_csv(Path(out_dir) / "summary.csv")
    return [
        RunSummary(
            r["label"], float(r["w"]), r["metric"], float(r["mean"]), float(r["std"]), int(r["n_ok"]), int(r["n_failed"]),
        )
        for r in rows
    ]

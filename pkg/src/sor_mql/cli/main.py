#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
命令行主逻辑模块
"""

import json
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np

from ..config import resolve_config, seed_list
from ..errors import DimensionMismatch, SorError
from ..game import DEFAULT_TOL, solve_matrix_game
from ..harness import (
    ExperimentConfig,
    emit_plot,
    read_payoff_csv,
    run_deep,
    run_linear_fa,
    run_sweep,
    run_tabular_ql,
    run_tabular_vi,
    validate_suite,
)
from ..linear import lemma_sequence_check
from ..utils.logger import debug, enable_debug_mode, error, get_logger
from ..utils.terminal import format_table, print_with_borders
from .parser import build_parser, config_overrides

# 获取日志记录器
logger = get_logger(__name__)


def parse_matrix(text: str) -> np.ndarray:
    """ "1,-1;-1,1" 形式的矩阵，行之间用分号分隔"""
    try:
        rows = [[float(v) for v in row.split(",")] for row in text.split(";") if row.strip()]
    except ValueError as e:
        raise DimensionMismatch(f"无法解析矩阵 {text!r}: {e}") from None
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise DimensionMismatch(f"矩阵 {text!r} 的各行长度不一致")
    return np.array(rows)


def _resolve(args, **extra) -> Dict[str, Any]:
    overrides = config_overrides(args)
    overrides.update(extra)
    return resolve_config(Path(args.config) if args.config else None, overrides)


def _report(args, title: str, data: Mapping[str, Any], rows: Optional[Sequence[Sequence[Any]]] = None, header: Sequence[str] = ()):
    """--json 时输出 JSON，否则打印带边框的报告"""
    if args.json:
        print(json.dumps(dict(data), sort_keys=True, ensure_ascii=False, indent=2))
        return
    lines = [f"{k}: {_fmt(v)}" for k, v in data.items() if not isinstance(v, (list, dict))]
    if rows:
        lines += [""] + format_table(header, [[_fmt(c) for c in r] for r in rows])
    print_with_borders(title, lines)


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def solve_matrix(args) -> int:
    q = read_payoff_csv(Path(args.input)) if args.input else parse_matrix(args.matrix)
    sol = solve_matrix_game(q, args.tol if args.tol is not None else DEFAULT_TOL)
    print(json.dumps({
        "value": sol.value,
        "strategy": sol.strategy.tolist(),
        "opponent_strategy": sol.opponent_strategy.tolist(),
        "residual": sol.residual,
    }))
    return 0


def tabular_vi(args) -> int:
    config = _resolve(args, algorithm="tabular-vi")
    summary = run_tabular_vi(config, Path(config["out"]), config["force"])
    summary["out"] = config["out"]
    _report(args, "SOR 值迭代", summary)
    return 0


def tabular_ql(args) -> int:
    config = _resolve(args, algorithm="tabular-ql")
    out = Path(config["out"])
    results = []
    for seed in seed_list(config):
        result = run_tabular_ql(config, seed, out / f"seed-{seed}", config["force"])
        results.append({"seed": seed, **result})
    errors = [r["final_error"] for r in results]
    data = {"w": config["w"], "steps": config["steps"], "mean_final_error": float(np.mean(errors)), "runs": results}
    _report(args, "SOR Q 学习", data, [(r["seed"], r["final_error"]) for r in results], ("seed", "final_error"))
    return 0


def linear_fa(args) -> int:
    config = _resolve(args, algorithm="linear-fa")
    result = run_linear_fa(config, seed_list(config), Path(config["out"]), config["force"])
    data = {
        "w": config["w"],
        "T": config["T"],
        "certified": result.certified,
        "coverage": result.coverage,
        "statement_coverage": result.statement_coverage,
        "mean_final_xi": float(np.mean(result.final_errors)),
        "proof_bound": float(result.proof_bound[-1]),
        "theorem_bound": float(result.theorem_bound[-1]),
    }
    _report(args, "投影线性递推", data)
    return 0


def bound_check(args) -> int:
    config = _resolve(args)
    report = lemma_sequence_check(
        config["H"], config["t0"], config["tau"], config["horizon"], args.gamma_prime, args.exponent, raise_on_violation=False,
    )
    data = report.to_dict()
    rows = [
        ("beta", report.beta_slack),
        ("square_sum", report.square_sum_slack),
        ("weighted_sum", report.weighted_sum_slack),
    ]
    _report(args, "步长序列不等式", data, rows, ("inequality", "min_slack"))
    return 0 if report.passed else 1


def train_deep(args) -> int:
    extra = {"algorithm": "deep"}
    if args.baseline:
        extra["w"] = 1.0
    config = _resolve(args, **extra)
    out = Path(config["out"])
    results = []
    for seed in seed_list(config):
        result = run_deep(config, seed, out / f"seed-{seed}", config["force"])
        results.append({"seed": seed, **result})
    losses = [r["converged_loss"] for r in results]
    data = {"w": config["w"], "steps": config["steps"], "mean_converged_loss": float(np.mean(losses)), "runs": results}
    _report(args, "D-SOR-MQL 训练", data, [(r["seed"], r["converged_loss"], r["episodes"]) for r in results], ("seed", "converged_loss", "episodes"))
    return 0


def sweep(args) -> int:
    config = _resolve(args)
    result = run_sweep(ExperimentConfig.from_config(config), config["jobs"], config["force"])
    data = {"algorithm": config["algorithm"], "out": config["out"], "summary": [asdict(s) for s in result.summaries]}
    rows = [(s.label, s.w, s.metric, s.mean, s.std, s.n_ok, s.n_failed) for s in result.summaries]
    _report(args, "w 消融扫描", data, rows, ("label", "w", "metric", "mean", "std", "n_ok", "n_failed"))
    return 0


def plot(args) -> int:
    labels = [v.strip() for v in args.labels.split(",")] if args.labels else None
    path = emit_plot([Path(p) for p in args.csv], args.x, args.y, Path(args.svg), labels, args.title)
    print(path)
    return 0


def validate(args) -> int:
    config = _resolve(args)
    results = validate_suite(args.canary, seed=config["seed"])
    if args.json:
        print(json.dumps([r.to_dict() for r in results], ensure_ascii=False, indent=2))
    else:
        rows = [(r.name, "跳过" if r.skipped else ("通过" if r.passed else "失败"), r.slack, r.detail) for r in results]
        print_with_borders("性质检查", format_table(("property", "status", "slack", "detail"), [[_fmt(c) for c in r] for r in rows]))
    return 0 if all(r.passed for r in results) else 1


def dispatch(args) -> int:
    """按子命令分发"""
    if args.command == "solve-matrix":
        return solve_matrix(args)
    elif args.command == "tabular-vi":
        return tabular_vi(args)
    elif args.command == "tabular-ql":
        return tabular_ql(args)
    elif args.command == "linear-fa":
        return linear_fa(args)
    elif args.command == "bound-check":
        return bound_check(args)
    elif args.command == "train-deep":
        return train_deep(args)
    elif args.command == "sweep":
        return sweep(args)
    elif args.command == "plot":
        return plot(args)
    elif args.command == "validate":
        return validate(args)
    raise ValueError(f"未知子命令 {args.command}")


def main(argv: Optional[List[str]] = None) -> int:
    """主函数，返回进程退出码"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 0

    # 如果设置了调试标志，则在整个执行过程中使用 DEBUG 级别
    if args.debug:
        enable_debug_mode()
        debug("调试模式已启用")

    try:
        return dispatch(args)
    except SorError as e:
        error(f"{type(e).__name__}: {e}")
        print(f"错误: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.error(f"未预期的错误: {e}", exc_info=True)
        print(f"错误: {type(e).__name__}: {e}", file=sys.stderr)
        return 2

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
单次运行：四种算法各自的执行、落盘与指标提取

每个运行目录里有算法自己的 CSV、config.json 和 run.log。
"""

import math
from contextlib import contextmanager
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence

import numpy as np

from ..config import fingerprint, save_config
from ..deep import LOG_COLUMNS, AlgoConfig, save_weights, train
from ..errors import ConfigError
from ..envs import MarkovGameModel, Transition, enumerate_model, make_env
from ..linear import BoundParams, LinearExperimentResult, estimate_noise_bound, one_hot_features, run_linear_experiment
from ..tabular import SorConfig, generalized_policy_iteration, run_q_learning, value_iteration, w_star
from ..utils.logger import attach_file_handler, detach_file_handler, get_logger
from .io import check_output, read_columns, read_csv, write_csv, write_dict_rows, write_jsonl

logger = get_logger(__name__)

ALGORITHMS = ("tabular-vi", "tabular-ql", "linear-fa", "deep")

# 每种算法的主 CSV 与汇总指标
PRIMARY_CSV = {
    "tabular-vi": "residuals.csv",
    "tabular-ql": "ql_curve.csv",
    "linear-fa": "xi.csv",
    "deep": "log.csv",
}
METRIC_NAMES = {
    "tabular-vi": "iterations",
    "tabular-ql": "final_error",
    "linear-fa": "final_xi",
    "deep": "converged_loss",
}

CONVERGED_FRACTION = 0.1
NOISE_SAMPLES = 500


@contextmanager
def run_log(run_dir: Path) -> Iterator[None]:
    """运行期间把日志同时写到 run_dir/run.log"""
    handler = attach_file_handler(Path(run_dir) / "run.log")
    try:
        yield
    finally:
        detach_file_handler(handler)


def sor_config(config: Mapping[str, Any], w: Optional[float] = None) -> SorConfig:
    return SorConfig(config["w"] if w is None else w, config["gamma"], config["strict"])


def build_model(config: Mapping[str, Any]) -> MarkovGameModel:
    """枚举配置中的环境"""
    env = make_env(config["env"], config["grid"], config["max_episode_steps"])
    return enumerate_model(env, config["gamma"], config["state_cap"])


def tail_mean(values: Sequence[float], fraction: float = CONVERGED_FRACTION) -> float:
    """最后 fraction 比例元素的均值"""
    if len(values) == 0:
        return float("nan")
    tail = max(1, int(math.ceil(len(values) * fraction)))
    return float(np.mean(values[-tail:]))


def run_tabular_vi(config: Mapping[str, Any], run_dir: Path, force: bool = False) -> Dict[str, Any]:
    """SOR 值迭代（gpi_loops > 0 时改用广义策略迭代），写出 q_star.csv 与 residuals.csv"""
    fp = fingerprint(config)
    run_dir = Path(run_dir)
    check_output(run_dir / "q_star.csv", fp, force)
    model = build_model(config)
    cfg = sor_config(config)
    history: List[float] = []
    with run_log(run_dir):
        if config["gpi_loops"] > 0:
            q, iterations = generalized_policy_iteration(
                model, cfg, config["gpi_loops"], config["tol"], config["max_iters"], history=history,
            )
        else:
            q, iterations = value_iteration(model, cfg, config["tol"], config["max_iters"], history=history)
    bound = w_star(model)

    rows = (
        (s, a, o, q[s, a, o])
        for s in range(model.n_states)
        for a in range(model.n_actions)
        for o in range(model.n_opponent_actions)
    )
    write_csv(run_dir / "q_star.csv", ("s", "a", "o", "q"), rows, fp, force)
    if history:
        write_csv(run_dir / "residuals.csv", ("iteration", "residual"), enumerate(history, start=1), fp, True)
    save_config(dict(config, algorithm="tabular-vi"), run_dir / "config.json")
    residual = history[-1] if history else float("nan")
    logger.info(f"值迭代: {iterations} 次迭代，残差 {residual:.3e}，w* = {bound:.6g}")
    return {"iterations": iterations, "residual": residual, "w_star": bound, "n_states": model.n_states}


def run_tabular_ql(config: Mapping[str, Any], seed: int, run_dir: Path, force: bool = False) -> Dict[str, Any]:
    """在线 SOR Q 学习，误差对照 w = 1 值迭代得到的 Q*，写出 ql_curve.csv"""
    fp = fingerprint(config)
    run_dir = Path(run_dir)
    check_output(run_dir / "ql_curve.csv", fp, force)
    model = build_model(config)
    cfg = sor_config(config)
    q_star, _ = value_iteration(model, SorConfig(1.0, cfg.gamma), config["tol"], config["max_iters"])
    record_every = max(1, config["steps"] // 1000)
    with run_log(run_dir):
        _, curve = run_q_learning(
            model, cfg, config["H"], config["t0"], config["steps"], np.random.default_rng(seed), q_star, record_every,
        )
    write_csv(run_dir / "ql_curve.csv", ("step", "error"), curve, fp, force)
    save_config(dict(config, algorithm="tabular-ql", seed=seed), run_dir / "config.json")
    final = curve[-1][1] if curve else float("nan")
    logger.info(f"Q 学习: {config['steps']} 步后 ||Q - Q*|| = {final:.4g}")
    return {"final_error": final, "steps": config["steps"]}


def bound_params(config: Mapping[str, Any], cfg: SorConfig, dim: int, noise_bound: float) -> BoundParams:
    return BoundParams(
        noise_bound=noise_bound,
        H=config["H"],
        t0=config["t0"],
        tau=config["tau"],
        delta=config["delta"],
        gamma_prime=cfg.contraction_factor,
        radius=config["radius"],
        dim=dim,
        sigma=config["sigma"],
    )


def run_linear_fa(config: Mapping[str, Any], seeds: Sequence[int], run_dir: Path, force: bool = False) -> LinearExperimentResult:
    """指示特征下的投影线性递推，写出 xi.csv（每个种子一列，外加两条界曲线）"""
    fp = fingerprint(config)
    run_dir = Path(run_dir)
    check_output(run_dir / "xi.csv", fp, force)
    model = build_model(config)
    cfg = sor_config(config)
    phi = one_hot_features(model.n_states, model.n_actions, model.n_opponent_actions)
    noise = config["noise_bound"]
    if noise <= 0.0:
        noise = estimate_noise_bound(phi, model, cfg, NOISE_SAMPLES, np.random.default_rng(seeds[0]), config["radius"])
        logger.info(f"估计噪声上界 M~ = {noise:.4g}")
    p = bound_params(config, cfg, phi.dim, noise)
    with run_log(run_dir):
        result = run_linear_experiment(model, phi, cfg, p.schedule, p, config["T"], list(seeds))

    columns = ["step", *[f"xi_seed{s}" for s in seeds], "proof_bound", "theorem_bound"]
    rows = (
        (t, *result.errors[:, t], result.proof_bound[t], result.theorem_bound[t])
        for t in range(result.errors.shape[1])
    )
    write_csv(run_dir / "xi.csv", columns, rows, fp, force)
    save_config(dict(config, algorithm="linear-fa"), run_dir / "config.json")
    return result


def transition_record(t: int, episode: int, tr: Transition) -> Dict[str, Any]:
    """回合轨迹的一行"""
    return {
        "step": t,
        "episode": episode,
        "s": asdict(tr.s),
        "a": int(tr.a),
        "o": int(tr.o),
        "r": float(tr.r),
        "s_next": asdict(tr.s_next),
        "terminal": bool(tr.terminal),
        "truncated": bool(tr.truncated),
    }


def run_deep(config: Mapping[str, Any], seed: int, run_dir: Path, force: bool = False) -> Dict[str, Any]:
    """训练一个种子，写出 log.csv、config.json、weights.bin 与 weights.json；trace 为真时另写 episodes.jsonl"""
    run_config = dict(config, seed=seed, algorithm="deep")
    fp = fingerprint(run_config)
    run_dir = Path(run_dir)
    check_output(run_dir / "log.csv", fp, force)
    env = make_env(config["env"], config["grid"], config["max_episode_steps"])
    cfg = AlgoConfig.from_config(run_config)
    trace: List[Dict[str, Any]] = []

    def record(t: int, episode: int, tr: Transition) -> None:
        trace.append(transition_record(t, episode, tr))

    with run_log(run_dir):
        result = train(env, cfg, config["steps"], on_transition=record if config["trace"] else None)
    if config["trace"]:
        write_jsonl(run_dir / "episodes.jsonl", trace)
    write_dict_rows(run_dir / "log.csv", LOG_COLUMNS, result.rows, fp, force)
    save_config(run_config, run_dir / "config.json")
    save_weights(result.state.online, run_dir / "weights.bin")
    loss = result.converged_loss(CONVERGED_FRACTION)
    return {"converged_loss": loss, "episodes": result.episodes, "steps": config["steps"]}


def run_algorithm(config: Mapping[str, Any], seed: int, run_dir: Path, force: bool = False) -> float:
    """按 config['algorithm'] 运行一次并返回汇总指标"""
    algorithm = config["algorithm"]
    if algorithm == "tabular-vi":
        return float(run_tabular_vi(config, run_dir, force)["iterations"])
    if algorithm == "tabular-ql":
        return float(run_tabular_ql(config, seed, run_dir, force)["final_error"])
    if algorithm == "linear-fa":
        return float(run_linear_fa(config, [seed], run_dir, force).final_errors[0])
    if algorithm == "deep":
        return float(run_deep(config, seed, run_dir, force)["converged_loss"])
    raise ConfigError(f"未知算法 {algorithm}")


def metric_from_csv(algorithm: str, run_dir: Path, seed: int) -> float:
    """从运行目录的原始 CSV 重新计算汇总指标"""
    path = Path(run_dir) / PRIMARY_CSV[algorithm]
    if algorithm == "tabular-vi":
        _, _, rows = read_csv(path)
        return float(len(rows))
    if algorithm == "tabular-ql":
        return float(read_columns(path, ["error"])["error"][-1])
    if algorithm == "linear-fa":
        column = f"xi_seed{seed}"
        return float(read_columns(path, [column])[column][-1])
    return tail_mean(list(read_columns(path, ["loss_raw"])["loss_raw"]))

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
性质检查套件：LP 对偶、值迭代不动点与 w 无关、收缩因子、序列不等式、梯度正确性、线性与表格等价

每条性质给出通过与否以及余量；失败写进报告而不是抛出。
"""

from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..deep import batch_numeric_gradient, init_mlp, max_relative_error, mlp_gradient
from ..envs import MarkovGameModel
from ..errors import SorError
from ..game import solve_matrix_game
from ..linear import LinearParams, lemma_sequence_check, one_hot_features, sor_linear_update
from ..tabular import SorConfig, contraction_ratios, random_model, self_loop_model, sor_q_learning_step, value_iteration, w_star
from ..utils.logger import get_logger, log_function_call

logger = get_logger(__name__)

NO_MODELS = "没有可用的模型"


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    slack: float
    detail: str = ""
    skipped: bool = False

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


def _skipped(name: str, reason: str) -> PropertyResult:
    return PropertyResult(name, True, float("nan"), reason, True)


def check_lp_duality(rng: np.random.Generator, count: int = 200, max_size: int = 6) -> PropertyResult:
    """值落在纯策略 maximin 与 minimax 之间，互补松弛残差 <= 1e-9"""
    worst = np.inf
    for _ in range(count):
        rows, cols = rng.integers(1, max_size + 1, size=2)
        q = rng.uniform(-1.0, 1.0, size=(rows, cols))
        sol = solve_matrix_game(q)
        low, high = q.min(axis=1).max(), q.max(axis=0).min()
        bracket = min(sol.value - low, high - sol.value)
        worst = min(worst, 1e-9 - sol.residual, bracket + 1e-12)
    return PropertyResult("lp_duality", bool(worst >= 0.0), float(worst), f"{count} 个随机矩阵")


def check_fixed_point_invariance(models: Sequence[MarkovGameModel], tol: float = 1e-10) -> PropertyResult:
    """w = 1 与 w = min(1.3, w*) 的不动点相差 <= 1e-7"""
    name = "fixed_point_invariance"
    if not models:
        return _skipped(name, NO_MODELS)
    worst = np.inf
    for model in models:
        base, _ = value_iteration(model, SorConfig(1.0, model.gamma), tol)
        relaxed, _ = value_iteration(model, SorConfig(min(1.3, w_star(model)), model.gamma), tol)
        worst = min(worst, 1e-7 - float(np.max(np.abs(base - relaxed))))
    return PropertyResult(name, bool(worst >= 0.0), float(worst), f"{len(models)} 个模型")


def check_contraction(
    models: Sequence[MarkovGameModel],
    rng: np.random.Generator,
    w: float = 1.5,
    strict: bool = False,
    pairs: int = 50,
    name: str = "contraction",
) -> PropertyResult:
    """||T_w Q1 - T_w Q2|| / ||Q1 - Q2|| <= 1 - w(1 - gamma) + 1e-6"""
    if not models:
        return _skipped(name, NO_MODELS)
    worst = np.inf
    for model in models:
        cfg = SorConfig(w, model.gamma, strict)
        if strict and w > w_star(model):
            return PropertyResult(name, False, float(w_star(model) - w), f"w = {w} 超过 w* = {w_star(model):.6g}")
        ratios = contraction_ratios(model, cfg, pairs, rng)
        if ratios.size:
            worst = min(worst, cfg.contraction_factor + 1e-6 - float(ratios.max()))
    return PropertyResult(name, bool(worst >= 0.0), float(worst), f"w = {w}")


def check_lemmas(H: float = 40.0, t0: float = 160.0, tau: int = 1, horizon: int = 10000) -> PropertyResult:
    report = lemma_sequence_check(H, t0, tau, horizon, raise_on_violation=False)
    slack = min(report.beta_slack, report.square_sum_slack, report.weighted_sum_slack)
    return PropertyResult("lemma_sequences", report.passed, float(slack), f"H={H}, t0={t0}, horizon={horizon}")


def check_gradients(rng: np.random.Generator, batches: int = 3) -> PropertyResult:
    """反向传播与中心差分的最大相对误差 <= 1e-4"""
    worst = 0.0
    for _ in range(batches):
        params = init_mlp(5, 3, 2, rng, hidden=(8, 6))
        x = rng.uniform(-1.0, 1.0, size=(4, 5))
        pairs = rng.integers(0, 6, size=4)
        y = rng.uniform(-1.0, 1.0, size=4)
        _, analytic = mlp_gradient(params, x, pairs, y)
        numeric = batch_numeric_gradient(params, x, pairs, y)
        worst = max(worst, max_relative_error(analytic, numeric))
    return PropertyResult("gradient_check", bool(worst <= 1e-4), float(1e-4 - worst), f"{batches} 个批量")


def check_linear_tabular_equivalence(models: Sequence[MarkovGameModel], rng: np.random.Generator, steps: int = 200) -> PropertyResult:
    """指示特征、投影不起作用时线性更新与表格更新逐步一致"""
    name = "linear_tabular_equivalence"
    if not models:
        return _skipped(name, NO_MODELS)
    worst = 0.0
    for model in models:
        cfg = SorConfig(min(1.3, w_star(model)), model.gamma)
        phi = one_hot_features(model.n_states, model.n_actions, model.n_opponent_actions)
        params = LinearParams(np.zeros(phi.dim), 1e6)
        q = np.zeros((model.n_states, model.n_actions, model.n_opponent_actions))
        triples = model.non_terminal_triples()
        for k in range(steps):
            s, a, o = (int(v) for v in triples[rng.integers(len(triples))])
            t = model.sample(s, a, o, rng)
            alpha = min(1.0, 10.0 / (k + 10.0))
            q = sor_q_learning_step(q, t, alpha, cfg)
            params = sor_linear_update(params, t, alpha, cfg, phi)
            worst = max(worst, float(np.max(np.abs(params.theta - q.reshape(-1)))))
    return PropertyResult(name, bool(worst <= 1e-12), float(1e-12 - worst), f"{steps} 步")


def _canary(models: Sequence[MarkovGameModel], rng: np.random.Generator) -> PropertyResult:
    """strict 模式下 w 超过 w*，必须报告违反"""
    if not models:
        return _skipped("contraction_canary", NO_MODELS)
    return check_contraction(models, rng, w=w_star(models[0]) + 0.5, strict=True, name="contraction_canary")


def default_models(rng: np.random.Generator, count: int = 3) -> List[MarkovGameModel]:
    return [random_model(3, 2, 2, 0.9, rng, self_loop=0.3) for _ in range(count)]


@log_function_call
def validate_suite(canary: bool = False, models: Optional[Sequence[MarkovGameModel]] = None, seed: int = 0) -> List[PropertyResult]:
    """运行全部性质检查

    Args:
        canary: 为真时在 strict 模式下用 w > w* 做收缩检查，应当报告违反
        models: 用于模型相关检查的模型，None 时随机生成；空列表时这些检查被跳过
        seed: 随机种子
    """
    rng = np.random.default_rng(seed)
    if models is None:
        models = default_models(rng)
    loop_models = [self_loop_model(3, 2, 2, 0.95, rng) for _ in range(2)] if models else []

    checks: List[Tuple[str, Callable[[], PropertyResult]]] = [
        ("lp_duality", lambda: check_lp_duality(rng)),
        ("fixed_point_invariance", lambda: check_fixed_point_invariance(models)),
        ("contraction", lambda: check_contraction(loop_models, rng)),
        ("lemma_sequences", check_lemmas),
        ("gradient_check", lambda: check_gradients(rng)),
        ("linear_tabular_equivalence", lambda: check_linear_tabular_equivalence(models, rng)),
    ]
    if canary:
        checks.append(("contraction_canary", lambda: _canary(models, rng)))

    results = []
    for name, check in checks:
        try:
            result = check()
        except SorError as e:
            result = PropertyResult(name, False, float("nan"), f"{type(e).__name__}: {e}")
        results.append(result)
        if result.skipped:
            logger.info(f"跳过 {result.name}: {result.detail}")
        elif result.passed:
            logger.debug(f"{result.name} 通过，余量 {result.slack:.3e}")
        else:
            logger.warning(f"{result.name} 未通过: {result.detail}")
    return results

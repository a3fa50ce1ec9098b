#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
表格型 SOR 极小极大算子

T_w Q(s,a,o) = w [R(s,a,o) + gamma * sum_s' P(s'|s,a,o) V(s')] + (1 - w) V(s)，
其中 V(s) = val(Q(s,.,.))。w = 1 时就是经典的极小极大 Bellman 算子。
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..envs.base import MarkovGameModel, Transition
from ..errors import ConfigError, DimensionMismatch, InvalidParams, NoConvergence
from ..game import DEFAULT_TOL, batch_response_values, game_value, solve_matrix_game
from ..utils.logger import get_logger, log_function_call

logger = get_logger(__name__)


@dataclass(frozen=True)
class SorConfig:
    """松弛参数 w 与折扣 gamma；strict 为真时拒绝 w > w*"""

    w: float = 1.0
    gamma: float = 0.95
    strict: bool = False

    def __post_init__(self):
        if not self.w >= 1.0:
            raise ConfigError(f"松弛参数 w 必须 >= 1，得到 {self.w}")
        if not 0.0 < self.gamma < 1.0:
            raise ConfigError(f"gamma 必须在 (0, 1) 内，得到 {self.gamma}")

    @property
    def contraction_factor(self) -> float:
        """1 - w(1 - gamma)，w <= w* 时的模长收缩因子"""
        return 1.0 - self.w * (1.0 - self.gamma)


def w_star(model: MarkovGameModel) -> float:
    """w* = 1 / (1 - gamma * min P(s|s,a,o))"""
    idx = np.arange(model.n_states)
    self_loops = model.P[idx, :, :, idx]
    return 1.0 / (1.0 - model.gamma * float(self_loops.min()))


def check_relaxation(model: MarkovGameModel, cfg: SorConfig) -> None:
    """strict 模式下 w 超过 w* 视为配置错误"""
    if cfg.strict:
        bound = w_star(model)
        if cfg.w > bound * (1.0 + 1e-12):
            raise ConfigError(f"w = {cfg.w} 超过 w* = {bound:.6g}，不保证收缩")


def _check_table(model: MarkovGameModel, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    expected = (model.n_states, model.n_actions, model.n_opponent_actions)
    if q.shape != expected:
        raise DimensionMismatch(f"Q 表形状 {q.shape} 与模型 {expected} 不一致")
    return q


def state_values(q: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """逐状态求矩阵博弈值 V(s) = val(Q(s,.,.))"""
    return np.array([game_value(q[s], tol) for s in range(q.shape[0])])


def _relax(model: MarkovGameModel, cfg: SorConfig, v_next: np.ndarray, v_here: np.ndarray) -> np.ndarray:
    expected_next = np.einsum("saot,t->sao", model.P, v_next)
    return cfg.w * (model.R + cfg.gamma * expected_next) + (1.0 - cfg.w) * v_here[:, None, None]


def sor_bellman_apply(model: MarkovGameModel, q, cfg: SorConfig, tol: float = DEFAULT_TOL) -> np.ndarray:
    """计算 T_w Q"""
    q = _check_table(model, q)
    v = state_values(q, tol)
    return _relax(model, cfg, v, v)


@log_function_call
def value_iteration(
    model: MarkovGameModel,
    cfg: SorConfig,
    tol: float = 1e-10,
    max_iters: int = 100000,
    q0: Optional[np.ndarray] = None,
    history: Optional[List[float]] = None,
) -> Tuple[np.ndarray, int]:
    """SOR 值迭代，返回 (Q, 迭代次数)

    停止条件是相邻迭代的上确界范数残差 <= tol。history 不为 None 时逐次追加残差。
    """
    if tol <= 0:
        raise InvalidParams("tol 必须为正")
    check_relaxation(model, cfg)
    q = np.zeros((model.n_states, model.n_actions, model.n_opponent_actions)) if q0 is None else _check_table(model, q0).copy()

    residual = float("inf")
    for k in range(1, max_iters + 1):
        q_next = sor_bellman_apply(model, q, cfg)
        residual = float(np.max(np.abs(q_next - q)))
        q = q_next
        if history is not None:
            history.append(residual)
        if residual <= tol:
            logger.debug(f"值迭代在第 {k} 次收敛，残差 {residual:.3e}")
            return q, k
    raise NoConvergence(f"值迭代 {max_iters} 次后残差仍为 {residual:.3e}", max_iters, residual)


def extract_policy(q, tol: float = DEFAULT_TOL) -> np.ndarray:
    """逐状态的最大化方最优混合策略，形状 (S, A)"""
    q = np.asarray(q, dtype=float)
    if q.ndim != 3:
        raise DimensionMismatch(f"Q 表必须是三维数组，得到形状 {q.shape}")
    return np.array([solve_matrix_game(q[s], tol).strategy for s in range(q.shape[0])])


def policy_evaluation_apply(model: MarkovGameModel, q, pi, cfg: SorConfig) -> np.ndarray:
    """固定最大化方策略 pi、最小化方做最优反应时的 T_w^pi Q"""
    q = _check_table(model, q)
    pi = np.asarray(pi, dtype=float)
    if pi.shape != (model.n_states, model.n_actions):
        raise DimensionMismatch(f"策略形状 {pi.shape} 与模型不一致")
    v = batch_response_values(pi, q)
    return _relax(model, cfg, v, v)


@log_function_call
def generalized_policy_iteration(
    model: MarkovGameModel,
    cfg: SorConfig,
    n: int = 1,
    tol: float = 1e-10,
    max_iters: int = 100000,
    history: Optional[List[float]] = None,
) -> Tuple[np.ndarray, int]:
    """广义策略迭代：pi = K(Q)，再做 n 次 T_w^pi

    n = 1 时与值迭代逐步一致。
    """
    if n < 1:
        raise InvalidParams("评估次数 n 至少为 1")
    if tol <= 0:
        raise InvalidParams("tol 必须为正")
    check_relaxation(model, cfg)
    q = np.zeros((model.n_states, model.n_actions, model.n_opponent_actions))

    residual = float("inf")
    for i in range(1, max_iters + 1):
        pi = extract_policy(q)
        q_next = q
        for _ in range(n):
            q_next = policy_evaluation_apply(model, q_next, pi, cfg)
        residual = float(np.max(np.abs(q_next - q)))
        q = q_next
        if history is not None:
            history.append(residual)
        if residual <= tol:
            return q, i
    raise NoConvergence(f"策略迭代 {max_iters} 轮后残差仍为 {residual:.3e}", max_iters, residual)


def sor_target(q: np.ndarray, t: Transition, cfg: SorConfig, v_next: Optional[float] = None, v_here: Optional[float] = None) -> float:
    """在线 SOR 目标 w[r + gamma val(Q(s'))] + (1 - w) val(Q(s))，终止的 s' 贡献 0"""
    if v_next is None:
        v_next = 0.0 if t.terminal else game_value(q[t.s_next])
    elif t.terminal:
        v_next = 0.0
    if v_here is None:
        v_here = game_value(q[t.s])
    return cfg.w * (t.r + cfg.gamma * v_next) + (1.0 - cfg.w) * v_here


def sor_q_learning_step(q, t: Transition, alpha: float, cfg: SorConfig) -> np.ndarray:
    """在线 SOR 极小极大 Q 学习的一步，只改动 (s, a, o) 一个条目"""
    if not 0.0 <= alpha <= 1.0:
        raise InvalidParams(f"步长必须在 [0, 1] 内，得到 {alpha}")
    q = np.array(q, dtype=float)
    if q.ndim != 3:
        raise DimensionMismatch(f"Q 表必须是三维数组，得到形状 {q.shape}")
    target = sor_target(q, t, cfg)
    q[t.s, t.a, t.o] = q[t.s, t.a, t.o] + alpha * (target - q[t.s, t.a, t.o])
    return q


def step_size(k: int, H: float, t0: float) -> float:
    """alpha_k = H / (k + t0)，上限为 1"""
    return min(1.0, H / (k + t0))


@log_function_call
def run_q_learning(
    model: MarkovGameModel,
    cfg: SorConfig,
    H: float,
    t0: float,
    steps: int,
    rng: np.random.Generator,
    q_star: Optional[np.ndarray] = None,
    record_every: int = 1000,
) -> Tuple[np.ndarray, List[Tuple[int, float]]]:
    """均匀采样非终止 (s, a, o) 的在线 SOR Q 学习

    Returns:
        (Q, 误差曲线)，曲线是 (步数, ||Q_k - Q*||_inf) 列表；没有 q_star 时为空
    """
    check_relaxation(model, cfg)
    q = np.zeros((model.n_states, model.n_actions, model.n_opponent_actions))
    triples = model.non_terminal_triples()
    if triples.size == 0:
        return q, []
    cumulative = np.cumsum(model.P, axis=3)
    # 只有被更新的状态需要重新求值
    values = np.zeros(model.n_states)

    curve: List[Tuple[int, float]] = []
    if q_star is not None:
        curve.append((0, float(np.max(np.abs(q - q_star)))))
    for k in range(steps):
        s, a, o = (int(x) for x in triples[rng.integers(len(triples))])
        s_next = int(np.searchsorted(cumulative[s, a, o], rng.random(), side="right"))
        s_next = min(s_next, model.n_states - 1)
        t = Transition(s, a, o, float(model.R[s, a, o]), s_next, bool(model.terminal[s_next]))
        target = sor_target(q, t, cfg, values[s_next], values[s])
        q[s, a, o] = q[s, a, o] + step_size(k, H, t0) * (target - q[s, a, o])
        values[s] = game_value(q[s])
        if q_star is not None and ((k + 1) % record_every == 0 or k + 1 == steps):
            curve.append((k + 1, float(np.max(np.abs(q - q_star)))))
    return q, curve


def contraction_ratios(
    model: MarkovGameModel,
    cfg: SorConfig,
    pairs: int,
    rng: np.random.Generator,
    scale: float = 1.0,
) -> np.ndarray:
    """随机 Q 对上的 ||T_w Q1 - T_w Q2|| / ||Q1 - Q2||（上确界范数）"""
    shape = (model.n_states, model.n_actions, model.n_opponent_actions)
    ratios = []
    for _ in range(pairs):
        q1 = rng.uniform(-scale, scale, size=shape)
        q2 = rng.uniform(-scale, scale, size=shape)
        gap = float(np.max(np.abs(q1 - q2)))
        if gap == 0.0:
            continue
        image_gap = float(np.max(np.abs(sor_bellman_apply(model, q1, cfg) - sor_bellman_apply(model, q2, cfg))))
        ratios.append(image_gap / gap)
    return np.array(ratios)

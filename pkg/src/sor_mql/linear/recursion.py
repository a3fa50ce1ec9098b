#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
投影线性函数逼近下的 SOR 极小极大递推

theta_{t+1} = Pi_{2,Z}(theta_t + alpha_t psi(s,a,o) [y_t - psi(s,a,o)^T theta_t])，
y_t = w (r + gamma val(psi(s',.,.)^T theta_t)) + (1 - w) val(psi(s,.,.)^T theta_t)。
"""

from dataclasses import dataclass

import numpy as np

from ..envs.base import MarkovGameModel, Transition
from ..errors import DimensionMismatch, InvalidParams, RadiusNonPositive
from ..game import DEFAULT_TOL, game_value
from ..tabular import SorConfig
from .features import FeatureMap


@dataclass(frozen=True, eq=False)
class LinearParams:
    """参数向量 theta 与投影半径 Z"""

    theta: np.ndarray
    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise RadiusNonPositive(f"投影半径必须为正，得到 {self.radius}")
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))


def project_l2(theta, radius: float) -> np.ndarray:
    """投影到欧氏球 ||theta||_2 <= Z 上（径向缩放）"""
    if not radius > 0.0:
        raise RadiusNonPositive(f"投影半径必须为正，得到 {radius}")
    theta = np.asarray(theta, dtype=float)
    norm = float(np.linalg.norm(theta))
    if norm <= radius:
        return theta
    return theta * (radius / norm)


def _check_dim(theta: np.ndarray, phi: FeatureMap) -> None:
    if theta.shape != (phi.dim,):
        raise DimensionMismatch(f"theta 长度 {theta.shape} 与特征维度 {phi.dim} 不一致")


def linear_target(theta: np.ndarray, t: Transition, cfg: SorConfig, phi: FeatureMap, tol: float = DEFAULT_TOL) -> float:
    """单条转移的 SOR 目标 y_t"""
    v_next = 0.0 if t.terminal else game_value(phi.payoff(theta, t.s_next), tol)
    v_here = game_value(phi.payoff(theta, t.s), tol)
    return cfg.w * (t.r + cfg.gamma * v_next) + (1.0 - cfg.w) * v_here


def sor_linear_update(
    params: LinearParams,
    t: Transition,
    alpha: float,
    cfg: SorConfig,
    phi: FeatureMap,
    tol: float = DEFAULT_TOL,
) -> LinearParams:
    """一步随机逼近更新，随后投影回半径 Z 的球"""
    if not 0.0 <= alpha <= 1.0:
        raise InvalidParams(f"步长必须在 [0, 1] 内，得到 {alpha}")
    theta = params.theta
    _check_dim(theta, phi)
    psi = phi(t.s, t.a, t.o)
    target = linear_target(theta, t, cfg, phi, tol)
    raw = theta + alpha * psi * (target - psi @ theta)
    return LinearParams(project_l2(raw, params.radius), params.radius)


def _state_values(theta: np.ndarray, phi: FeatureMap, model: MarkovGameModel) -> np.ndarray:
    q = phi.q_table(theta)
    return np.array([game_value(q[s]) for s in range(model.n_states)])


def _check_model(phi: FeatureMap, model: MarkovGameModel) -> None:
    expected = (model.n_states, model.n_actions, model.n_opponent_actions)
    if tuple(phi.shape) != expected:
        raise DimensionMismatch(f"特征表 {phi.shape} 与模型 {expected} 不一致")


def expected_operator(theta, phi: FeatureMap, model: MarkovGameModel, cfg: SorConfig) -> np.ndarray:
    """F(theta) = E[psi(s,a,o) y]，(s,a,o) 在非终止三元组上均匀分布，s' 按 P 取期望"""
    theta = np.asarray(theta, dtype=float)
    _check_dim(theta, phi)
    _check_model(phi, model)
    triples = model.non_terminal_triples()
    if triples.size == 0:
        return np.zeros(phi.dim)
    values = _state_values(theta, phi, model)
    next_values = np.where(model.terminal, 0.0, values)
    s, a, o = triples[:, 0], triples[:, 1], triples[:, 2]
    targets = cfg.w * (model.R[s, a, o] + cfg.gamma * model.P[s, a, o] @ next_values) + (1.0 - cfg.w) * values[s]
    return (phi.table[s, a, o] * targets[:, None]).mean(axis=0)


def martingale_noise(theta, t: Transition, phi: FeatureMap, model: MarkovGameModel, cfg: SorConfig) -> np.ndarray:
    """采样方向 psi(s,a,o) y_t 与其期望 F(theta) 之差"""
    theta = np.asarray(theta, dtype=float)
    return phi(t.s, t.a, t.o) * linear_target(theta, t, cfg, phi) - expected_operator(theta, phi, model, cfg)


def _sample_ball(dim: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    direction = rng.standard_normal(dim)
    norm = np.linalg.norm(direction)
    if norm == 0.0:
        return np.zeros(dim)
    return direction / norm * radius * rng.random() ** (1.0 / dim)


def estimate_noise_bound(
    phi: FeatureMap,
    model: MarkovGameModel,
    cfg: SorConfig,
    samples: int,
    rng: np.random.Generator,
    radius: float = 10.0,
) -> float:
    """在半径 Z 的球内随机取 theta，经验上确界 max ||M||_2"""
    triples = model.non_terminal_triples()
    if triples.size == 0 or samples <= 0:
        return 0.0
    worst = 0.0
    for _ in range(samples):
        theta = _sample_ball(phi.dim, radius, rng)
        s, a, o = (int(x) for x in triples[rng.integers(len(triples))])
        t = model.sample(s, a, o, rng)
        worst = max(worst, float(np.linalg.norm(martingale_noise(theta, t, phi, model, cfg))))
    return worst


def estimate_contraction(
    phi: FeatureMap,
    model: MarkovGameModel,
    cfg: SorConfig,
    samples: int,
    rng: np.random.Generator,
    scale: float = 1.0,
) -> float:
    """随机 theta 对上 ||F(theta1) - F(theta2)||_2 / ||theta1 - theta2||_2 的最大值

    theta1 == theta2 的样本对跳过；没有有效样本时返回 0。
    """
    best = 0.0
    for _ in range(samples):
        theta1 = scale * rng.standard_normal(phi.dim)
        theta2 = scale * rng.standard_normal(phi.dim)
        gap = float(np.linalg.norm(theta1 - theta2))
        if gap == 0.0:
            continue
        image = expected_operator(theta1, phi, model, cfg) - expected_operator(theta2, phi, model, cfg)
        best = max(best, float(np.linalg.norm(image)) / gap)
    return best

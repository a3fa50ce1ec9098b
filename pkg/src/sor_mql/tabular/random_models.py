#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
随机生成的小型马尔可夫博弈，用作值迭代与 Q 学习的测试模型
"""

import numpy as np

from ..envs.base import MarkovGameModel
from ..errors import InvalidParams


def random_model(
    n_states: int,
    n_actions: int,
    n_opponent_actions: int,
    gamma: float,
    rng: np.random.Generator,
    self_loop: float = 0.0,
    reward_scale: float = 1.0,
) -> MarkovGameModel:
    """Dirichlet 转移与均匀奖励

    Args:
        self_loop: 每一行额外放在 s -> s 上的概率质量，保证 min P(s|s,a,o) >= self_loop
        reward_scale: 奖励在 [-reward_scale, reward_scale] 上均匀采样
    """
    if not 0.0 <= self_loop <= 1.0:
        raise InvalidParams("self_loop 必须在 [0, 1] 内")
    shape = (n_states, n_actions, n_opponent_actions)
    P = rng.dirichlet(np.ones(n_states), size=shape) * (1.0 - self_loop)
    idx = np.arange(n_states)
    P[idx, :, :, idx] += self_loop
    # 消除 Dirichlet 采样的舍入误差
    P /= P.sum(axis=3, keepdims=True)
    R = rng.uniform(-reward_scale, reward_scale, size=shape)
    return MarkovGameModel(P, R, gamma)


def self_loop_model(
    n_states: int,
    n_actions: int,
    n_opponent_actions: int,
    gamma: float,
    rng: np.random.Generator,
) -> MarkovGameModel:
    """每个 (s, a, o) 都以概率 1 留在 s，w* = 1 / (1 - gamma)"""
    return random_model(n_states, n_actions, n_opponent_actions, gamma, rng, self_loop=1.0)

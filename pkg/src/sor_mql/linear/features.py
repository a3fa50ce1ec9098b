#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
有限模型上的特征映射 psi(s, a, o)
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, NonFiniteInput


@dataclass(frozen=True, eq=False)
class FeatureMap:
    """预先计算好的特征表，形状 (S, A, O, d)

    构造时把范数大于 1 的特征向量缩放到单位球面上，保证 ||psi|| <= 1。
    """

    table: np.ndarray
    one_hot: bool = False

    def __post_init__(self):
        table = np.asarray(self.table, dtype=float)
        if table.ndim != 4:
            raise DimensionMismatch(f"特征表必须是 (S, A, O, d) 四维数组，得到 {table.shape}")
        if not np.all(np.isfinite(table)):
            raise NonFiniteInput("特征表包含 NaN 或 inf")
        norms = np.linalg.norm(table, axis=3, keepdims=True)
        table = np.where(norms > 1.0, table / np.maximum(norms, 1.0), table)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def dim(self) -> int:
        return self.table.shape[3]

    @property
    def shape(self):
        """(S, A, O)"""
        return self.table.shape[:3]

    def __call__(self, s: int, a: int, o: int) -> np.ndarray:
        return self.table[s, a, o]

    def payoff(self, theta: np.ndarray, s: int) -> np.ndarray:
        """状态 s 上诱导的收益矩阵 psi(s,.,.)^T theta"""
        return self.table[s] @ theta

    def q_table(self, theta: np.ndarray) -> np.ndarray:
        """全部状态的 Q = psi^T theta，形状 (S, A, O)"""
        return self.table @ theta


def one_hot_features(n_states: int, n_actions: int, n_opponent_actions: int) -> FeatureMap:
    """d = |S||A||O| 的指示特征，下标按 (s, a, o) 行优先展开"""
    d = n_states * n_actions * n_opponent_actions
    table = np.eye(d).reshape(n_states, n_actions, n_opponent_actions, d)
    return FeatureMap(table, one_hot=True)


def random_features(
    n_states: int,
    n_actions: int,
    n_opponent_actions: int,
    dim: int,
    rng: np.random.Generator,
) -> FeatureMap:
    """高斯随机特征，逐个缩放到单位范数"""
    table = rng.standard_normal((n_states, n_actions, n_opponent_actions, dim))
    table /= np.linalg.norm(table, axis=3, keepdims=True)
    return FeatureMap(table)

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
一阶优化器：Adam 与普通梯度下降
"""

from typing import List, Optional

import numpy as np

from ..errors import ConfigError
from .mlp import MlpParams


def _rebuild(template: MlpParams, arrays: List[np.ndarray]) -> MlpParams:
    return MlpParams(tuple(arrays[0::2]), tuple(arrays[1::2]), template.n_actions, template.n_opponent_actions)


class SGD:
    """theta <- theta - lr * g"""

    def __init__(self, learning_rate: float):
        self.learning_rate = learning_rate

    def update(self, params: MlpParams, grads: MlpParams) -> MlpParams:
        arrays = [p - self.learning_rate * g for p, g in zip(params.arrays(), grads.arrays())]
        return _rebuild(params, arrays)


class Adam:
    """Adam，带偏差修正"""

    def __init__(self, learning_rate: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.steps = 0
        self._m: Optional[List[np.ndarray]] = None
        self._v: Optional[List[np.ndarray]] = None

    def update(self, params: MlpParams, grads: MlpParams) -> MlpParams:
        values = params.arrays()
        gradients = grads.arrays()
        if self._m is None or self._v is None:
            self._m = [np.zeros_like(p) for p in values]
            self._v = [np.zeros_like(p) for p in values]
        self.steps += 1
        correction1 = 1.0 - self.beta1 ** self.steps
        correction2 = 1.0 - self.beta2 ** self.steps

        arrays = []
        for i, (p, g) in enumerate(zip(values, gradients)):
            self._m[i] = self.beta1 * self._m[i] + (1.0 - self.beta1) * g
            self._v[i] = self.beta2 * self._v[i] + (1.0 - self.beta2) * g * g
            m_hat = self._m[i] / correction1
            v_hat = self._v[i] / correction2
            arrays.append(p - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps))
        return _rebuild(params, arrays)


def make_optimizer(name: str, learning_rate: float):
    """按名字创建优化器: adam | sgd"""
    if name == "adam":
        return Adam(learning_rate)
    if name == "sgd":
        return SGD(learning_rate)
    raise ConfigError(f"未知的优化器: {name}")

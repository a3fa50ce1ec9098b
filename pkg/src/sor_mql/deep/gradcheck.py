#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
中心差分梯度，用来核对反向传播
"""

from typing import Callable

import numpy as np

from .mlp import MlpParams, mse_loss


def numeric_gradient(loss_fn: Callable[[MlpParams], float], params: MlpParams, h: float = 1e-5) -> MlpParams:
    """逐坐标 (L(theta + h e_i) - L(theta - h e_i)) / 2h"""
    flat = params.flatten()
    grad = np.zeros_like(flat)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + h
        plus = loss_fn(params.with_flat(flat))
        flat[i] = original - h
        minus = loss_fn(params.with_flat(flat))
        flat[i] = original
        grad[i] = (plus - minus) / (2.0 * h)
    return params.with_flat(grad)


def batch_numeric_gradient(params: MlpParams, features, pairs, targets, h: float = 1e-5) -> MlpParams:
    """对 mse_loss 的中心差分梯度"""
    return numeric_gradient(lambda p: mse_loss(p, features, pairs, targets), params, h)


def max_relative_error(analytic: MlpParams, numeric: MlpParams, floor: float = 1e-7) -> float:
    """max_i |a_i - n_i| / max(|a_i| + |n_i|, floor)"""
    a = analytic.flatten()
    n = numeric.flatten()
    return float(np.max(np.abs(a - n) / np.maximum(np.abs(a) + np.abs(n), floor)))

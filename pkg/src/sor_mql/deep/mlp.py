#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
numpy 实现的全连接网络：输入 -> 256 -> 128 -> |A||O|，隐藏层 ReLU，输出层线性

权重按 (输入, 输出) 存放，批量前向为 h @ W + b。
"""

import hashlib
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import DimensionMismatch

DEFAULT_HIDDEN = (256, 128)


@dataclass(frozen=True, eq=False)
class MlpParams:
    """逐层的权重与偏置"""

    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]
    n_actions: int
    n_opponent_actions: int

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise DimensionMismatch("权重与偏置的层数必须相同且非零")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise DimensionMismatch(f"第 {i} 层形状不一致: W {w.shape}, b {b.shape}")
            if i > 0 and self.weights[i - 1].shape[1] != w.shape[0]:
                raise DimensionMismatch(f"第 {i} 层输入维度与上一层输出不一致")
        if self.weights[-1].shape[1] != self.n_actions * self.n_opponent_actions:
            raise DimensionMismatch("输出层宽度必须等于 |A| * |O|")

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def arrays(self) -> List[np.ndarray]:
        """W0, b0, W1, b1, ... 的固定顺序"""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def copy(self) -> "MlpParams":
        return MlpParams(
            tuple(w.copy() for w in self.weights),
            tuple(b.copy() for b in self.biases),
            self.n_actions,
            self.n_opponent_actions,
        )

    def flatten(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    def with_flat(self, flat: np.ndarray) -> "MlpParams":
        """同结构、参数取自扁平向量的新网络"""
        flat = np.asarray(flat, dtype=float)
        arrays = []
        offset = 0
        for a in self.arrays():
            arrays.append(flat[offset:offset + a.size].reshape(a.shape).copy())
            offset += a.size
        if offset != flat.size:
            raise DimensionMismatch(f"扁平参数长度 {flat.size} 与网络参数个数 {offset} 不一致")
        return MlpParams(tuple(arrays[0::2]), tuple(arrays[1::2]), self.n_actions, self.n_opponent_actions)

    def digest(self) -> str:
        """参数内容的哈希，用于判断是否被改动"""
        return hashlib.sha256(self.flatten().tobytes()).hexdigest()

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())


def init_mlp(
    input_dim: int,
    n_actions: int,
    n_opponent_actions: int,
    rng: np.random.Generator,
    hidden: Sequence[int] = DEFAULT_HIDDEN,
) -> MlpParams:
    """按扇入缩放的均匀初始化 U(-1/sqrt(fan_in), 1/sqrt(fan_in))"""
    sizes = [input_dim, *hidden, n_actions * n_opponent_actions]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return MlpParams(tuple(weights), tuple(biases), n_actions, n_opponent_actions)


def _as_batch(p: MlpParams, features) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    if x.ndim != 2 or x.shape[1] != p.input_dim:
        raise DimensionMismatch(f"输入形状 {x.shape} 与网络输入维度 {p.input_dim} 不一致")
    return x


def _forward(p: MlpParams, x: np.ndarray):
    """返回输出以及每层的输入激活（供反向传播）"""
    activations = [x]
    h = x
    last = p.n_layers - 1
    for i, (w, b) in enumerate(zip(p.weights, p.biases)):
        z = h @ w + b
        h = z if i == last else np.maximum(z, 0.0)
        if i != last:
            activations.append(h)
    return h, activations


def mlp_forward_batch(p: MlpParams, features) -> np.ndarray:
    """批量前向，返回形状 (m, |A|, |O|)"""
    x = _as_batch(p, features)
    out, _ = _forward(p, x)
    return out.reshape(x.shape[0], p.n_actions, p.n_opponent_actions)


def mlp_forward(p: MlpParams, features) -> np.ndarray:
    """单个状态的 |A| x |O| 收益矩阵"""
    x = np.asarray(features, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch(f"单个状态的特征必须是一维向量，得到形状 {x.shape}")
    return mlp_forward_batch(p, x[None, :])[0]


def pair_index(p: MlpParams, a, o) -> np.ndarray:
    """(a, o) 在输出层中的下标"""
    return np.asarray(a, dtype=int) * p.n_opponent_actions + np.asarray(o, dtype=int)


def mse_loss(p: MlpParams, features, pairs, targets) -> float:
    """(1/2m) sum_k (q(s_k, a_k, o_k) - y_k)^2"""
    x = _as_batch(p, features)
    out, _ = _forward(p, x)
    pairs = np.asarray(pairs, dtype=int)
    diff = out[np.arange(x.shape[0]), pairs] - np.asarray(targets, dtype=float)
    return float(diff @ diff) / (2.0 * x.shape[0])


def mlp_gradient(p: MlpParams, features, pairs, targets) -> Tuple[float, MlpParams]:
    """损失 (1/2m) sum_k (q_k - y_k)^2 及其对全部参数的梯度

    Returns:
        (损失, 与 p 同结构的梯度)
    """
    x = _as_batch(p, features)
    m = x.shape[0]
    if m == 0:
        raise DimensionMismatch("批量不能为空")
    pairs = np.asarray(pairs, dtype=int)
    targets = np.asarray(targets, dtype=float)
    if pairs.shape != (m,) or targets.shape != (m,):
        raise DimensionMismatch(f"动作对 {pairs.shape} 与目标 {targets.shape} 需要与批量大小 {m} 一致")

    out, activations = _forward(p, x)
    rows = np.arange(m)
    diff = out[rows, pairs] - targets
    loss = float(diff @ diff) / (2.0 * m)

    delta = np.zeros_like(out)
    delta[rows, pairs] = diff / m
    grad_w: List[np.ndarray] = [np.empty(0)] * p.n_layers
    grad_b: List[np.ndarray] = [np.empty(0)] * p.n_layers
    for i in range(p.n_layers - 1, -1, -1):
        h = activations[i]
        grad_w[i] = h.T @ delta
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            # ReLU 的导数：激活为正处取 1
            delta = (delta @ p.weights[i].T) * (h > 0.0)
    return loss, MlpParams(tuple(grad_w), tuple(grad_b), p.n_actions, p.n_opponent_actions)

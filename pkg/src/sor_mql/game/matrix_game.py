#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
单状态矩阵博弈的精确求解：val 算子与策略算子 K

行对应最大化方的动作 a，列对应最小化方的动作 o，元素为 Q(s, a, o)。
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, InvalidParams, NonFiniteInput, SolverFailure
from ..utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_TOL = 1e-9

# 主元判定阈值，与 tol 无关
_PIVOT_EPS = 1e-12


@dataclass(frozen=True)
class GameSolution:
    """矩阵博弈的解

    Attributes:
        strategy: 最大化方的最优混合策略（LP 中的 rho）
        value: 博弈值 zeta
        opponent_strategy: 最小化方的最优混合策略（LP 对偶解）
        residual: 互补松弛残差 max(value - min_o pi^T Q, max_a Q mu - value)
    """

    strategy: np.ndarray
    value: float
    opponent_strategy: np.ndarray
    residual: float = 0.0


def as_payoff_matrix(q) -> np.ndarray:
    """校验并转换为二维浮点矩阵"""
    q = np.asarray(q, dtype=float)
    if q.ndim != 2 or q.shape[0] < 1 or q.shape[1] < 1:
        raise DimensionMismatch(f"收益矩阵必须是非空二维数组，得到形状 {q.shape}")
    if not np.all(np.isfinite(q)):
        raise NonFiniteInput("收益矩阵包含 NaN 或 inf")
    return q


def _as_strategy(pi, rows: int) -> np.ndarray:
    pi = np.asarray(pi, dtype=float)
    if pi.ndim != 1 or pi.shape[0] != rows:
        raise DimensionMismatch(f"策略长度 {pi.shape} 与矩阵行数 {rows} 不一致")
    return pi


def _pure_saddle(q: np.ndarray):
    """存在纯策略鞍点时返回 (行, 列)，否则 None"""
    row_min = q.min(axis=1)
    col_max = q.max(axis=0)
    a = int(np.argmax(row_min))
    o = int(np.argmin(col_max))
    if row_min[a] == col_max[o]:
        return a, o
    return None


def _simplex(m: np.ndarray, max_iters: int):
    """Bland 规则的稠密单纯形法

    求解 max 1^T y  s.t.  M y <= 1, y >= 0（M 严格为正）。
    返回 (y, x)，x 是约束的对偶变量，即最终目标行上松弛变量的系数。
    """
    rows, cols = m.shape
    # 表格: [M | I | b]，目标行: [-1 ... | 0 ... | 0]
    tableau = np.zeros((rows + 1, cols + rows + 1))
    tableau[:rows, :cols] = m
    tableau[:rows, cols:cols + rows] = np.eye(rows)
    tableau[:rows, -1] = 1.0
    tableau[rows, :cols] = -1.0
    basis = list(range(cols, cols + rows))

    for _ in range(max_iters):
        objective = tableau[rows, :-1]
        entering = np.flatnonzero(objective < -_PIVOT_EPS)
        if entering.size == 0:
            break
        col = int(entering[0])

        column = tableau[:rows, col]
        candidates = np.flatnonzero(column > _PIVOT_EPS)
        if candidates.size == 0:
            # 正矩阵下 LP 有界，出现说明实现有误
            raise SolverFailure("单纯形法遇到无界方向")
        ratios = tableau[candidates, -1] / column[candidates]
        best = ratios.min()
        ties = candidates[ratios <= best + _PIVOT_EPS * max(1.0, abs(best))]
        # Bland: 比值相同时选基变量下标最小的行
        row = int(min(ties, key=lambda r: basis[r]))

        tableau[row] /= tableau[row, col]
        for r in range(rows + 1):
            if r != row and tableau[r, col] != 0.0:
                tableau[r] -= tableau[r, col] * tableau[row]
        basis[row] = col
    else:
        raise SolverFailure(f"单纯形法超过迭代上限 {max_iters}")

    y = np.zeros(cols)
    for r, var in enumerate(basis):
        if var < cols:
            y[var] = tableau[r, -1]
    x = tableau[rows, cols:cols + rows].copy()
    return y, x


def _normalize(v: np.ndarray) -> np.ndarray:
    v = np.where(v > 0.0, v, 0.0)
    total = v.sum()
    if total <= 0.0:
        raise SolverFailure("LP 解无法归一化为概率分布")
    return v / total


def solve_matrix_game(q, tol: float = DEFAULT_TOL) -> GameSolution:
    """求解矩阵博弈，返回最大化方的最优混合策略与博弈值（算子 K）

    先平移 Delta = 1 + max(0, -min Q) 使所有元素严格为正，再解倒数形式的 LP，
    最后把值平移回去。

    Args:
        q: |A| x |O| 收益矩阵
        tol: 互补松弛残差容差

    Returns:
        GameSolution
    """
    q = as_payoff_matrix(q)
    if tol <= 0:
        raise InvalidParams("tol 必须为正")
    rows, cols = q.shape

    saddle = _pure_saddle(q)
    if saddle is not None:
        a, o = saddle
        strategy = np.zeros(rows)
        strategy[a] = 1.0
        opponent = np.zeros(cols)
        opponent[o] = 1.0
        return GameSolution(strategy, float(q[a, o]), opponent, 0.0)

    shift = 1.0 + max(0.0, -float(q.min()))
    y, x = _simplex(q + shift, max_iters=50 * (rows + cols) + 100)
    total = y.sum()
    if total <= 0.0:
        raise SolverFailure("LP 最优值非正")

    value = 1.0 / total - shift
    strategy = _normalize(x)
    opponent = _normalize(y)

    guaranteed = float((strategy @ q).min())
    conceded = float((q @ opponent).max())
    residual = max(value - guaranteed, conceded - value, 0.0)
    if residual > tol * max(1.0, abs(value)):
        logger.warning(f"矩阵博弈互补松弛残差 {residual:.3e} 超过容差 {tol:.1e}")
    return GameSolution(strategy, float(value), opponent, residual)


def game_value(q, tol: float = DEFAULT_TOL) -> float:
    """val 算子：矩阵博弈的值"""
    return solve_matrix_game(q, tol).value


def response_value(pi, q) -> float:
    """最小化方对固定策略 pi 做最优反应时的收益 min_o sum_a pi(a) Q(a, o)"""
    q = np.asarray(q, dtype=float)
    if q.ndim != 2:
        raise DimensionMismatch(f"收益矩阵必须是二维数组，得到形状 {q.shape}")
    pi = _as_strategy(pi, q.shape[0])
    return float((pi @ q).min())


def best_response_column(pi, q) -> int:
    """达到 response_value 的列下标，平局取最小下标"""
    q = np.asarray(q, dtype=float)
    if q.ndim != 2:
        raise DimensionMismatch(f"收益矩阵必须是二维数组，得到形状 {q.shape}")
    pi = _as_strategy(pi, q.shape[0])
    return int(np.argmin(pi @ q))


def batch_response_values(pis: np.ndarray, qs: np.ndarray) -> np.ndarray:
    """批量 response_value：pis 形状 (m, A)，qs 形状 (m, A, O)"""
    pis = np.asarray(pis, dtype=float)
    qs = np.asarray(qs, dtype=float)
    if qs.ndim != 3 or pis.shape != qs.shape[:2]:
        raise DimensionMismatch(f"策略 {pis.shape} 与矩阵 {qs.shape} 不一致")
    return np.einsum("ma,mao->mo", pis, qs).min(axis=1)

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
把有限网格博弈枚举成显式的 MarkovGameModel
"""

from typing import Any, Dict

import numpy as np

from ..errors import StateSpaceTooLarge
from ..utils.logger import get_logger
from .base import GridGame, MarkovGameModel

logger = get_logger(__name__)


def enumerate_model(env: GridGame, gamma: float = 0.95, state_cap: int = 1000) -> MarkovGameModel:
    """枚举全部联合状态，得到精确的 P 与 R

    最后一个下标是吸收汇点；终止构型和所有终止转移都流入汇点，奖励为 0。
    Soccer 的随机执行顺序在这里展开成 0.5/0.5 的混合。

    Args:
        env: 网格博弈实例
        gamma: 折扣因子
        state_cap: 状态数上限（含汇点）

    Returns:
        MarkovGameModel，states 字段保存状态对象，汇点为 None
    """
    states = env.states()
    n_states = len(states) + 1
    if n_states > state_cap:
        raise StateSpaceTooLarge(f"{env.name} {env.n}x{env.n} 有 {n_states} 个状态，超过上限 {state_cap}")

    index: Dict[Any, int] = {s: i for i, s in enumerate(states)}
    sink = n_states - 1
    n_a, n_o = env.n_actions, env.n_opponent_actions
    P = np.zeros((n_states, n_a, n_o, n_states))
    R = np.zeros((n_states, n_a, n_o))
    terminal = np.zeros(n_states, dtype=bool)
    terminal[sink] = True
    P[sink, :, :, sink] = 1.0

    for i, state in enumerate(states):
        if env.is_terminal(state):
            terminal[i] = True
            P[i, :, :, sink] = 1.0
            continue
        for a in range(n_a):
            for o in range(n_o):
                for prob, tr in env.outcomes(state, a, o):
                    target = sink if tr.terminal else index[tr.s_next]
                    P[i, a, o, target] += prob
                    R[i, a, o] += prob * tr.r

    logger.debug(f"枚举 {env.name} {env.n}x{env.n}: {n_states} 个状态")
    return MarkovGameModel(P, R, gamma, terminal, states + [None])

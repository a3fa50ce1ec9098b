#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Soccer 博弈（Littman 式布局推广到 n x n）

A 是最大化方，向右进攻；B 向左进攻。球门是左右两列中间的 ceil(n/2) 个格子。
两名球员的动作以均匀随机的先后顺序执行；试图走进对手当前格子的动作被取消，
同时球权转给另一方。持球者走进对方球门格子即进球。
"""

import math
from dataclasses import dataclass, replace
from typing import List, Tuple

import numpy as np

from ..errors import InvalidParams, SteppingTerminalState
from .base import MOVES, GridGame, GridPos, Transition, parse_action

SOCCER_ACTION_NAMES = ("N", "S", "E", "W", "stand")


@dataclass(frozen=True)
class SoccerState:
    pos_a: GridPos
    pos_b: GridPos
    ball_with_a: bool
    grid_side: int


def goal_rows(n: int) -> range:
    """球门所在的行"""
    height = math.ceil(n / 2)
    start = (n - height) // 2
    return range(start, start + height)


def in_goal_of_b(pos: GridPos, n: int) -> bool:
    """A 的进攻目标：右列的球门格"""
    return pos.col == n - 1 and pos.row in goal_rows(n)


def in_goal_of_a(pos: GridPos, n: int) -> bool:
    """B 的进攻目标：左列的球门格"""
    return pos.col == 0 and pos.row in goal_rows(n)


def _execute(state: SoccerState, mover_is_a: bool, action: int) -> Tuple[SoccerState, float, bool]:
    """执行单个球员的动作，返回 (新状态, A 视角奖励, 是否进球)"""
    n = state.grid_side
    own = state.pos_a if mover_is_a else state.pos_b
    other = state.pos_b if mover_is_a else state.pos_a
    target = own.moved(MOVES[action], n)

    if target == own:
        return state, 0.0, False
    if target == other:
        # 撞人：动作取消，球权易手
        return replace(state, ball_with_a=not state.ball_with_a), 0.0, False

    if mover_is_a:
        state = replace(state, pos_a=target)
        if state.ball_with_a and in_goal_of_b(target, n):
            return state, 1.0, True
    else:
        state = replace(state, pos_b=target)
        if not state.ball_with_a and in_goal_of_a(target, n):
            return state, -1.0, True
    return state, 0.0, False


def _resolve(state: SoccerState, a: int, o: int, a_first: bool) -> Transition:
    order = ((True, a), (False, o)) if a_first else ((False, o), (True, a))
    current = state
    for mover_is_a, action in order:
        current, reward, scored = _execute(current, mover_is_a, action)
        if scored:
            return Transition(state, a, o, reward, current, True)
    return Transition(state, a, o, 0.0, current, False)


def soccer_step(state: SoccerState, a, o, rng: np.random.Generator) -> Transition:
    """同时行动的一步，rng 决定执行顺序"""
    if state.pos_a == state.pos_b:
        raise SteppingTerminalState("两名球员不能处在同一格")
    a = parse_action(a, SOCCER_ACTION_NAMES)
    o = parse_action(o, SOCCER_ACTION_NAMES)
    a_first = bool(rng.random() < 0.5)
    return _resolve(state, a, o, a_first)


class Soccer(GridGame):
    """Soccer 环境"""

    name = "soccer"
    action_names = SOCCER_ACTION_NAMES
    feature_dim = 5

    def __init__(self, grid: int = 7, max_episode_steps: int = 500):
        if grid < 3:
            raise InvalidParams("Soccer 网格边长至少为 3")
        super().__init__(grid, max_episode_steps)

    def initial_state(self, rng: np.random.Generator) -> SoccerState:
        """两名球员在整个网格上取不同格子，球权掷硬币决定；站在球门格不算进球"""
        cells = self.cells()
        i, j = rng.choice(len(cells), size=2, replace=False)
        ball_with_a = bool(rng.random() < 0.5)
        return SoccerState(cells[int(i)], cells[int(j)], ball_with_a, self.n)

    def transition(self, state, a, o, rng) -> Transition:
        return soccer_step(state, a, o, rng)

    def outcomes(self, state, a, o) -> List[Tuple[float, Transition]]:
        a = parse_action(a, SOCCER_ACTION_NAMES)
        o = parse_action(o, SOCCER_ACTION_NAMES)
        return [(0.5, _resolve(state, a, o, True)), (0.5, _resolve(state, a, o, False))]

    def states(self) -> List[SoccerState]:
        cells = self.cells()
        return [
            SoccerState(pa, pb, ball, self.n)
            for pa in cells
            for pb in cells
            if pa != pb
            for ball in (True, False)
        ]

    def is_terminal(self, state) -> bool:
        # 进球是转移事件，状态本身没有终止构型
        return False

    def encode(self, state) -> np.ndarray:
        return encode_soccer(state)


def encode_soccer(state: SoccerState) -> np.ndarray:
    scale = float(state.grid_side - 1)
    coords = np.array(
        (state.pos_a.row, state.pos_a.col, state.pos_b.row, state.pos_b.col),
        dtype=float,
    ) / scale
    return np.append(coords, 1.0 if state.ball_with_a else 0.0)

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Guard-Invader 博弈

守卫是最大化方（动作 a），入侵者是最小化方（动作 o），两者同时移动。
奖励从守卫视角给出，并除以 R_max = max(10, 2(n-1)) 归一化到 [-1, 1]。
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..errors import SteppingTerminalState
from .base import GridGame, GridPos, Transition, parse_action

GI_ACTION_NAMES = ("up", "down", "left", "right", "stay")
GI_MOVES = ((-1, 0), (1, 0), (0, -1), (0, 1), (0, 0))

INVASION_REWARD = -10.0


@dataclass(frozen=True)
class GuardInvaderState:
    guard: GridPos
    invader: GridPos
    door: GridPos
    grid_side: int

    @property
    def terminal(self) -> bool:
        return self.invader == self.door or self.guard == self.invader


def reward_scale(n: int) -> float:
    """R_max，保证 11x11 上最大距离 20 也落在 [-1, 1]"""
    return max(10.0, 2.0 * (n - 1))


def default_door(n: int) -> GridPos:
    """门在左边缘中点"""
    return GridPos(n // 2, 0)


def gi_step(state: GuardInvaderState, a, o, rng: Optional[np.random.Generator] = None) -> Transition:
    """同时执行守卫动作 a 与入侵者动作 o

    入侵者到达门（包括在门上被抓）: -10；在门外被抓: +曼哈顿距离(入侵者, 门)；
    其余为 0。rng 不参与，保留是为了与 soccer_step 同签名。
    """
    if state.terminal:
        raise SteppingTerminalState("Guard-Invader 状态已经终止")
    a = parse_action(a, GI_ACTION_NAMES)
    o = parse_action(o, GI_ACTION_NAMES)
    n = state.grid_side

    guard = state.guard.moved(GI_MOVES[a], n)
    invader = state.invader.moved(GI_MOVES[o], n)
    s_next = GuardInvaderState(guard, invader, state.door, n)

    if invader == state.door:
        raw = INVASION_REWARD
    elif guard == invader:
        raw = float(invader.manhattan(state.door))
    else:
        raw = 0.0
    return Transition(state, a, o, raw / reward_scale(n), s_next, s_next.terminal)


class GuardInvader(GridGame):
    """Guard-Invader 环境"""

    name = "guard-invader"
    action_names = GI_ACTION_NAMES
    feature_dim = 6

    def __init__(self, grid: int = 7, max_episode_steps: int = 500, door: Optional[GridPos] = None):
        super().__init__(grid, max_episode_steps)
        self.door = door if door is not None else default_door(grid)

    def initial_state(self, rng: np.random.Generator) -> GuardInvaderState:
        """守卫和入侵者从不同的非门格子里均匀采样"""
        free = [c for c in self.cells() if c != self.door]
        i, j = rng.choice(len(free), size=2, replace=False)
        return GuardInvaderState(free[int(i)], free[int(j)], self.door, self.n)

    def transition(self, state, a, o, rng=None) -> Transition:
        return gi_step(state, a, o, rng)

    def outcomes(self, state, a, o) -> List[Tuple[float, Transition]]:
        return [(1.0, gi_step(state, a, o))]

    def states(self) -> List[GuardInvaderState]:
        cells = self.cells()
        return [GuardInvaderState(g, i, self.door, self.n) for g in cells for i in cells]

    def is_terminal(self, state) -> bool:
        return state.terminal

    def encode(self, state) -> np.ndarray:
        return encode_guard_invader(state)


def encode_guard_invader(state: GuardInvaderState) -> np.ndarray:
    scale = float(max(1, state.grid_side - 1))
    coords = (
        state.guard.row, state.guard.col,
        state.invader.row, state.invader.col,
        state.door.row, state.door.col,
    )
    return np.array(coords, dtype=float) / scale

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
环境公共类型：网格坐标、转移元组、显式马尔可夫博弈模型
"""

from dataclasses import dataclass, field
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DimensionMismatch, InvalidAction, InvalidParams, NonFiniteInput, SteppingTerminalState

# 行号向下增长: up/N = 行减一
MOVES: Tuple[Tuple[int, int], ...] = ((-1, 0), (1, 0), (0, 1), (0, -1), (0, 0))


@dataclass(frozen=True, order=True)
class GridPos:
    row: int
    col: int

    def moved(self, delta: Tuple[int, int], n: int) -> "GridPos":
        """按位移移动，出界时原地不动"""
        r, c = self.row + delta[0], self.col + delta[1]
        if 0 <= r < n and 0 <= c < n:
            return GridPos(r, c)
        return self

    def manhattan(self, other: "GridPos") -> int:
        return abs(self.row - other.row) + abs(self.col - other.col)


@dataclass(frozen=True)
class Transition:
    """一次转移 (s, a, o, r, s', terminal)

    truncated 表示因步数上限结束回合，不影响自举。
    """

    s: Any
    a: int
    o: int
    r: float
    s_next: Any
    terminal: bool
    truncated: bool = False


@dataclass
class MarkovGameModel:
    """显式的 (S, A, O, P, R, gamma)

    P 形状 (S, A, O, S)，R 形状 (S, A, O)；terminal 标记吸收终止状态。
    """

    P: np.ndarray
    R: np.ndarray
    gamma: float
    terminal: Optional[np.ndarray] = None
    states: Optional[List[Any]] = field(default=None, repr=False)

    def __post_init__(self):
        self.P = np.asarray(self.P, dtype=float)
        self.R = np.asarray(self.R, dtype=float)
        if self.terminal is None:
            self.terminal = np.zeros(self.P.shape[0], dtype=bool)
        self.terminal = np.asarray(self.terminal, dtype=bool)
        self.validate()

    @property
    def n_states(self) -> int:
        return self.P.shape[0]

    @property
    def n_actions(self) -> int:
        return self.P.shape[1]

    @property
    def n_opponent_actions(self) -> int:
        return self.P.shape[2]

    def validate(self, atol: float = 1e-12) -> None:
        P, R = self.P, self.R
        if P.ndim != 4 or P.shape[0] != P.shape[3]:
            raise DimensionMismatch(f"P 的形状必须是 (S, A, O, S)，得到 {P.shape}")
        if R.shape != P.shape[:3]:
            raise DimensionMismatch(f"R 的形状 {R.shape} 与 P {P.shape} 不一致")
        if self.terminal.shape != (P.shape[0],):
            raise DimensionMismatch("terminal 标记长度与状态数不一致")
        if not np.all(np.isfinite(R)):
            raise NonFiniteInput("R 包含非有限值")
        if np.any(P < 0.0) or not np.allclose(P.sum(axis=3), 1.0, rtol=0.0, atol=atol):
            raise InvalidParams("P 的每一行必须是概率分布")
        if not 0.0 < self.gamma < 1.0:
            raise InvalidParams(f"gamma 必须在 (0, 1) 内，得到 {self.gamma}")

    def non_terminal_triples(self) -> np.ndarray:
        """所有非终止 (s, a, o) 三元组，形状 (N, 3)"""
        states = np.flatnonzero(~self.terminal)
        grid = np.array(
            [(s, a, o) for s in states for a in range(self.n_actions) for o in range(self.n_opponent_actions)],
            dtype=int,
        )
        return grid.reshape(-1, 3)

    def sample(self, s: int, a: int, o: int, rng: np.random.Generator) -> Transition:
        """按 P 采样下一状态，奖励取 R(s, a, o)"""
        s_next = int(rng.choice(self.n_states, p=self.P[s, a, o]))
        return Transition(s, a, o, float(self.R[s, a, o]), s_next, bool(self.terminal[s_next]))


def parse_action(action, names: Sequence[str]) -> int:
    """动作可以是下标或名字"""
    if isinstance(action, str):
        key = action.lower()
        lowered = [n.lower() for n in names]
        if key in lowered:
            return lowered.index(key)
        raise InvalidAction(f"未知动作 {action!r}，可选 {list(names)}")
    if isinstance(action, (bool, np.bool_)):
        raise InvalidAction(f"未知动作 {action!r}")
    try:
        index = int(action)
    except (TypeError, ValueError):
        raise InvalidAction(f"未知动作 {action!r}") from None
    if index != action or not 0 <= index < len(names):
        raise InvalidAction(f"动作下标 {action!r} 超出范围 0..{len(names) - 1}")
    return index


class GridGame:
    """同时行动网格博弈的公共部分：回合状态、步数上限、截断"""

    name = "grid"
    action_names: Tuple[str, ...] = ()
    feature_dim = 0

    def __init__(self, grid: int = 7, max_episode_steps: int = 500):
        if grid < 2:
            raise InvalidParams("网格边长至少为 2")
        self.n = grid
        self.max_episode_steps = max_episode_steps
        self.state = None
        self.steps = 0
        self.done = True

    @property
    def n_actions(self) -> int:
        return len(self.action_names)

    @property
    def n_opponent_actions(self) -> int:
        return len(self.action_names)

    def cells(self) -> List[GridPos]:
        return [GridPos(r, c) for r in range(self.n) for c in range(self.n)]

    def reset(self, rng: np.random.Generator):
        self.state = self.initial_state(rng)
        self.steps = 0
        self.done = False
        return self.state

    def step(self, a, o, rng: np.random.Generator) -> Transition:
        """推进当前回合一步；达到步数上限时标记 truncated"""
        if self.done or self.state is None:
            raise SteppingTerminalState("回合已经结束，请先 reset")
        tr = self.transition(self.state, a, o, rng)
        self.steps += 1
        if not tr.terminal and self.steps >= self.max_episode_steps:
            tr = Transition(tr.s, tr.a, tr.o, tr.r, tr.s_next, False, True)
        self.state = tr.s_next
        self.done = tr.terminal or tr.truncated
        return tr

    # 子类实现
    def initial_state(self, rng: np.random.Generator):
        raise NotImplementedError

    def transition(self, state, a, o, rng: np.random.Generator) -> Transition:
        raise NotImplementedError

    def outcomes(self, state, a, o) -> List[Tuple[float, Transition]]:
        raise NotImplementedError

    def states(self) -> List[Any]:
        raise NotImplementedError

    def is_terminal(self, state) -> bool:
        raise NotImplementedError

    def encode(self, state) -> np.ndarray:
        raise NotImplementedError

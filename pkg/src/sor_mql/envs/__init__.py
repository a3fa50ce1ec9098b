"""
Guard-Invader 与 Soccer 两个同时行动的零和网格博弈
"""

import numpy as np

from ..errors import ConfigError
from .base import MOVES, GridGame, GridPos, MarkovGameModel, Transition, parse_action
from .guard_invader import (
    GI_ACTION_NAMES,
    GuardInvader,
    GuardInvaderState,
    default_door,
    encode_guard_invader,
    gi_step,
    reward_scale,
)
from .model import enumerate_model
from .soccer import SOCCER_ACTION_NAMES, Soccer, SoccerState, encode_soccer, goal_rows, soccer_step

ENVIRONMENTS = {
    GuardInvader.name: GuardInvader,
    Soccer.name: Soccer,
}


def make_env(name: str, grid: int = 7, max_episode_steps: int = 500) -> GridGame:
    """按名字创建环境"""
    try:
        cls = ENVIRONMENTS[name]
    except KeyError:
        raise ConfigError(f"未知环境 {name!r}，可选 {sorted(ENVIRONMENTS)}") from None
    return cls(grid, max_episode_steps)


def encode_features(state) -> np.ndarray:
    """状态的网络输入向量：坐标除以 n-1，Soccer 追加持球标记"""
    if isinstance(state, GuardInvaderState):
        return encode_guard_invader(state)
    if isinstance(state, SoccerState):
        return encode_soccer(state)
    raise TypeError(f"无法编码的状态类型 {type(state).__name__}")


__all__ = [
    "ENVIRONMENTS",
    "GI_ACTION_NAMES",
    "MOVES",
    "SOCCER_ACTION_NAMES",
    "GridGame",
    "GridPos",
    "GuardInvader",
    "GuardInvaderState",
    "MarkovGameModel",
    "Soccer",
    "SoccerState",
    "Transition",
    "default_door",
    "encode_features",
    "encode_guard_invader",
    "encode_soccer",
    "enumerate_model",
    "gi_step",
    "goal_rows",
    "make_env",
    "parse_action",
    "reward_scale",
    "soccer_step",
]

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
经验回放缓冲区
"""

from typing import List

import numpy as np

from ..envs.base import Transition
from ..errors import InvalidParams


class ReplayBuffer:
    """定长环形缓冲区，满了以后覆盖最旧的转移"""

    def __init__(self, capacity: int = 10000):
        if capacity < 1:
            raise InvalidParams("回放容量至少为 1")
        self.capacity = capacity
        self._storage: List[Transition] = []
        self._next = 0

    def __len__(self) -> int:
        return len(self._storage)

    def add(self, transition: Transition) -> None:
        if len(self._storage) < self.capacity:
            self._storage.append(transition)
        else:
            self._storage[self._next] = transition
        self._next = (self._next + 1) % self.capacity

    def can_sample(self, batch_size: int) -> bool:
        return len(self._storage) >= batch_size

    def sample(self, batch_size: int, rng: np.random.Generator) -> List[Transition]:
        """不放回地均匀抽取 batch_size 条转移"""
        if not self.can_sample(batch_size):
            raise InvalidParams(f"缓冲区只有 {len(self)} 条转移，不足一个批量 {batch_size}")
        indices = rng.choice(len(self._storage), size=batch_size, replace=False)
        return [self._storage[int(i)] for i in indices]

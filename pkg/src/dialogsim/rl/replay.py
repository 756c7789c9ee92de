"""Experience replay pool with the dynamic flush strategy's primitives."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

import numpy as np


@dataclass
class Experience:
    """One transition: state, action index, reward, next state, terminal flag."""

    s: np.ndarray
    a: int
    r: float
    s_next: np.ndarray
    done: bool


class ReplayBuffer:
    """Bounded pool; appends drop the oldest entry, flush() empties it."""

    def __init__(self, capacity: int):
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._pool: deque[Experience] = deque(maxlen=capacity)

    def __len__(self) -> int:
        return len(self._pool)

    @property
    def full(self) -> bool:
        return len(self._pool) >= self.capacity

    def append(self, experience: Experience):
        self._pool.append(experience)

    def flush(self):
        self._pool.clear()

    def sample(self, batch_size: int, rng: random.Random) -> list[Experience]:
        """Uniform sample with replacement."""
        pool = self._pool
        return [pool[rng.randrange(len(pool))] for _ in range(batch_size)]


def batch_arrays(batch: list[Experience]):
    states = np.stack([e.s for e in batch])
    actions = np.array([e.a for e in batch], dtype=np.int64)
    rewards = np.array([e.r for e in batch], dtype=np.float64)
    next_states = np.stack([e.s_next for e in batch])
    dones = np.array([1.0 if e.done else 0.0 for e in batch], dtype=np.float64)
    return states, actions, rewards, next_states, dones

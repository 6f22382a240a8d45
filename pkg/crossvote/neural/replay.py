"""Experience replay for Deep Q-learning."""
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from crossvote.errors import DimensionError


@dataclass(frozen=True)
class Transition:
    obs: np.ndarray
    action: int
    reward: float
    next_obs: np.ndarray
    terminal: bool


@dataclass
class TransitionBatch:
    obs: np.ndarray        # (n, d)
    actions: np.ndarray    # (n,)
    rewards: np.ndarray    # (n,)
    next_obs: np.ndarray   # (n, d)
    terminal: np.ndarray   # (n,) bool

    def __len__(self) -> int:
        return len(self.actions)

    @classmethod
    def from_transitions(cls, transitions: Sequence[Transition]) -> "TransitionBatch":
        if len(transitions) == 0:
            return cls(np.zeros((0, 0)), np.zeros(0, dtype=np.int64), np.zeros(0),
                       np.zeros((0, 0)), np.zeros(0, dtype=bool))
        return cls(
            obs=np.stack([np.asarray(t.obs, dtype=np.float64) for t in transitions]),
            actions=np.array([t.action for t in transitions], dtype=np.int64),
            rewards=np.array([t.reward for t in transitions], dtype=np.float64),
            next_obs=np.stack([np.asarray(t.next_obs, dtype=np.float64) for t in transitions]),
            terminal=np.array([t.terminal for t in transitions], dtype=bool),
        )


class ReplayBuffer:
    """Fixed-capacity ring buffer with uniform sampling from a seeded stream."""

    def __init__(self, capacity: int, obs_dim: int, rng: np.random.Generator):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.obs_dim = obs_dim
        self.rng = rng
        self._obs = np.zeros((capacity, obs_dim))
        self._next_obs = np.zeros((capacity, obs_dim))
        self._actions = np.zeros(capacity, dtype=np.int64)
        self._rewards = np.zeros(capacity)
        self._terminal = np.zeros(capacity, dtype=bool)
        self._size = 0
        self._cursor = 0

    def __len__(self) -> int:
        return self._size

    def add(self, t: Transition) -> None:
        if np.shape(t.obs) != (self.obs_dim,) or np.shape(t.next_obs) != (self.obs_dim,):
            raise DimensionError(f"transition observations must have length {self.obs_dim}")
        i = self._cursor
        self._obs[i] = t.obs
        self._next_obs[i] = t.next_obs
        self._actions[i] = t.action
        self._rewards[i] = t.reward
        self._terminal[i] = t.terminal
        self._cursor = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int) -> TransitionBatch:
        if self._size == 0:
            raise ValueError("cannot sample from an empty buffer")
        idx = self.rng.integers(0, self._size, size=batch_size)
        return TransitionBatch(
            obs=self._obs[idx], actions=self._actions[idx], rewards=self._rewards[idx],
            next_obs=self._next_obs[idx], terminal=self._terminal[idx],
        )

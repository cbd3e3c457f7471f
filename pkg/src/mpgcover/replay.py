"""Experience replay: a FIFO ring of transitions with uniform sampling."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator

from .env import JointAction, JointState


class WarmupError(RuntimeError):
    """The buffer holds fewer transitions than a sample requests."""


@dataclass(frozen=True)
class Transition:
    """One environment step: the reward is the team potential after the move."""

    s: JointState
    a: JointAction
    r: int
    s_next: JointState


class ReplayBuffer:
    """Fixed-capacity ring; once full, each push evicts the oldest transition."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._items: list[Transition] = []
        self._next = 0

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self) -> Iterator[Transition]:
        """Oldest to newest."""
        yield from self._items[self._next :]
        yield from self._items[: self._next]

    def push(self, transition: Transition) -> None:
        if len(self._items) < self.capacity:
            self._items.append(transition)
        else:
            self._items[self._next] = transition
        self._next = (self._next + 1) % self.capacity

    def sample(self, k: int, rng: random.Random) -> list[Transition]:
        """k uniform draws with replacement; deterministic for a given rng state."""
        if k < 1:
            raise ValueError(f"sample size must be >= 1, got {k}")
        if k > len(self._items):
            raise WarmupError(f"buffer holds {len(self._items)} transitions, need {k}")
        return [self._items[rng.randrange(len(self._items))] for _ in range(k)]

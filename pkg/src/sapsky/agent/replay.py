"""Proportional prioritized replay on a sum tree."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Transition:
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray
    priority: float = 1.0


class SumTree:
    """Binary tree of priorities; ``find`` maps a mass in [0, total) to a leaf."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.leaves = 1 << max(0, int(capacity - 1).bit_length())
        self.tree = np.zeros(2 * self.leaves)

    @property
    def total(self) -> float:
        return float(self.tree[1])

    def __getitem__(self, idx):
        return self.tree[self.leaves + np.asarray(idx)]

    def update(self, idx, value):
        idx = np.atleast_1d(np.asarray(idx, dtype=np.int64)) + self.leaves
        self.tree[idx] = np.atleast_1d(value)
        parents = np.unique(idx // 2)
        while parents.size and parents[0] >= 1:
            self.tree[parents] = self.tree[2 * parents] + self.tree[2 * parents + 1]
            if parents[0] == 1:
                break
            parents = np.unique(parents // 2)

    def find(self, mass):
        mass = np.array(mass, dtype=float, ndmin=1)
        node = np.ones(mass.shape, dtype=np.int64)
        while node[0] < self.leaves:
            left = 2 * node
            go_right = mass >= self.tree[left]
            mass = np.where(go_right, mass - self.tree[left], mass)
            node = np.where(go_right, left + 1, left)
        return node - self.leaves


class PrioritizedReplay:
    """Ring buffer sampled with probability proportional to ``priority**exponent``."""

    def __init__(self, capacity: int, exponent: float = 0.6, eps: float = 1e-3):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.exponent = exponent
        self.eps = eps
        self.tree = SumTree(capacity)
        self.storage: list = [None] * capacity
        self.pos = 0
        self.size = 0
        self.max_priority = 1.0

    def __len__(self):
        return self.size

    def store(self, transition: Transition) -> int:
        transition.priority = self.max_priority
        idx = self.pos
        self.storage[idx] = transition
        self.tree.update(idx, self.max_priority ** self.exponent)
        self.pos = (self.pos + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)
        return idx

    def probabilities(self) -> np.ndarray:
        return self.tree[np.arange(self.size)] / self.tree.total

    def sample(self, batch_size: int, rng: np.random.Generator, beta: float = 0.4):
        """Draw ``batch_size`` indices i.i.d. in proportion to priority.

        Returns ``(transitions, weights, indices)`` where the importance
        weights ``(N * P(i))**-beta`` are scaled so their maximum is one.
        """
        if self.size == 0:
            raise IndexError("cannot sample from an empty replay buffer")
        total = self.tree.total
        idx = self.tree.find(rng.random(batch_size) * total)
        idx = np.minimum(idx, self.size - 1)
        probs = self.tree[idx] / total
        weights = (self.size * probs) ** (-beta)
        weights /= weights.max()
        return [self.storage[i] for i in idx], weights, idx

    def update_priorities(self, indices, td_errors):
        prio = np.abs(np.asarray(td_errors, dtype=float)) + self.eps
        for i, p in zip(np.asarray(indices), prio):
            self.storage[i].priority = float(p)
        self.tree.update(indices, prio ** self.exponent)
        self.max_priority = max(self.max_priority, float(prio.max()))

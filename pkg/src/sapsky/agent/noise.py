"""Exploration noise."""
from __future__ import annotations

import numpy as np


class OuNoise:
    """Discrete Ornstein-Uhlenbeck process: ``x += theta (mu - x) + sigma N(0, 1)``."""

    def __init__(self, size, theta=0.15, sigma=0.2, mu=0.0, rng=None):
        self.theta, self.sigma, self.mu = theta, sigma, mu
        self.rng = np.random.default_rng() if rng is None else rng
        self.current = np.full(size, mu, dtype=float)

    def reset(self):
        self.current[:] = self.mu

    def step(self) -> np.ndarray:
        drift = self.theta * (self.mu - self.current)
        self.current = self.current + drift + self.sigma * self.rng.standard_normal(self.current.shape)
        return self.current


def ou_step(noise: OuNoise, rng=None) -> np.ndarray:
    if rng is not None:
        noise.rng = rng
    return noise.step()

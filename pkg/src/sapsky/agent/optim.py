"""Parameter-update rules with global gradient-norm clipping."""
from __future__ import annotations

import numpy as np


def clip_by_global_norm(grads, max_norm):
    if max_norm is None:
        return grads
    norm = np.sqrt(sum(float(np.sum(g * g)) for g in grads))
    if norm > max_norm:
        return [g * (max_norm / norm) for g in grads]
    return grads


class SGD:
    def __init__(self, params, lr, clip=1.0):
        self.params, self.lr, self.clip = params, lr, clip

    def step(self, grads):
        for p, g in zip(self.params, clip_by_global_norm(grads, self.clip)):
            p -= self.lr * g


class Adam:
    def __init__(self, params, lr, clip=1.0, betas=(0.9, 0.999), eps=1e-8):
        self.params, self.lr, self.clip = params, lr, clip
        self.b1, self.b2, self.eps = betas[0], betas[1], eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads):
        self.t += 1
        c1 = 1.0 - self.b1 ** self.t
        c2 = 1.0 - self.b2 ** self.t
        for p, g, m, v in zip(self.params, clip_by_global_norm(grads, self.clip), self.m, self.v):
            m *= self.b1
            m += (1.0 - self.b1) * g
            v *= self.b2
            v += (1.0 - self.b2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def make_optimizer(kind, params, lr, clip):
    if kind == "sgd":
        return SGD(params, lr, clip)
    if kind == "adam":
        return Adam(params, lr, clip)
    raise ValueError(f"unknown optimizer {kind!r}")

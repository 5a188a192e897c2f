"""Fully connected networks with hand-written reverse mode."""
from __future__ import annotations

import numpy as np


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class Mlp:
    """ReLU MLP with an optional side input joined at one hidden layer.

    ``sizes = [in, h1, ..., out]``.  When ``inject_width > 0`` the side input
    (the critic's action) is concatenated with the output of hidden layer
    ``inject_at`` before the next affine map, so with ``inject_at=1`` it
    enters the second hidden layer.
    """

    def __init__(self, sizes, output="identity", inject_width=0, inject_at=1, rng=None,
                 final_scale=None):
        if output not in ("identity", "sigmoid"):
            raise ValueError("output must be 'identity' or 'sigmoid'")
        if inject_width and not 1 <= inject_at < len(sizes) - 1:
            raise ValueError("inject_at must name a hidden layer")
        rng = np.random.default_rng() if rng is None else rng
        self.sizes = list(sizes)
        self.output = output
        self.inject_width = inject_width
        self.inject_at = inject_at
        self.params = []
        n_layers = len(sizes) - 1
        for j in range(n_layers):
            fan_in = sizes[j] + (inject_width if inject_width and j == inject_at else 0)
            bound = final_scale if (final_scale is not None and j == n_layers - 1) else 1.0 / np.sqrt(fan_in)
            self.params.append(rng.uniform(-bound, bound, (fan_in, sizes[j + 1])))
            self.params.append(rng.uniform(-bound, bound, sizes[j + 1]))
        self._cache = None

    @property
    def n_layers(self):
        return len(self.sizes) - 1

    def copy(self) -> "Mlp":
        twin = object.__new__(Mlp)
        twin.__dict__.update(self.__dict__)
        twin.params = [p.copy() for p in self.params]
        twin._cache = None
        return twin

    def forward(self, x, extra=None):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[1] != self.sizes[0]:
            raise ValueError(f"input width {x.shape[1]} != {self.sizes[0]}")
        if self.inject_width:
            if extra is None:
                raise ValueError("this network needs a side input")
            extra = np.atleast_2d(np.asarray(extra, dtype=float))
            if extra.shape != (x.shape[0], self.inject_width):
                raise ValueError(f"side input shape {extra.shape} != {(x.shape[0], self.inject_width)}")
        inputs, pre = [], []
        h = x
        for j in range(self.n_layers):
            if self.inject_width and j == self.inject_at:
                h = np.concatenate([h, extra], axis=1)
            inputs.append(h)
            z = h @ self.params[2 * j] + self.params[2 * j + 1]
            pre.append(z)
            if j < self.n_layers - 1:
                h = np.maximum(z, 0.0)
            else:
                h = _sigmoid(z) if self.output == "sigmoid" else z
        self._cache = (inputs, pre, h)
        return h[0] if single else h

    def backward(self, grad_out):
        """Gradients of ``sum(grad_out * y)`` for the last ``forward`` call.

        Returns ``(param_grads, d_input, d_side_input)``.
        """
        if self._cache is None:
            raise RuntimeError("backward needs a cached forward pass")
        inputs, pre, y = self._cache
        g = np.atleast_2d(np.asarray(grad_out, dtype=float))
        if self.output == "sigmoid":
            g = g * y * (1.0 - y)
        grads = [None] * len(self.params)
        d_extra = None
        for j in range(self.n_layers - 1, -1, -1):
            if j < self.n_layers - 1:
                g = g * (pre[j] > 0)
            grads[2 * j] = inputs[j].T @ g
            grads[2 * j + 1] = g.sum(axis=0)
            g = g @ self.params[2 * j].T
            if self.inject_width and j == self.inject_at:
                d_extra = g[:, -self.inject_width:]
                g = g[:, :-self.inject_width]
        return grads, g, d_extra


def soft_update(target: Mlp, source: Mlp, tau: float) -> None:
    for t, s in zip(target.params, source.params):
        if t.shape != s.shape:
            raise ValueError("target and source shapes differ")
        t *= 1.0 - tau
        t += tau * s


def param_distance(a: Mlp, b: Mlp) -> float:
    return float(np.sqrt(sum(np.sum((x - y) ** 2) for x, y in zip(a.params, b.params))))

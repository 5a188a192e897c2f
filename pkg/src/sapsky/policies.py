"""Threshold policies compared in the experiments."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .env import Action

KINDS = ("no_filtering", "fixed_threshold", "sa_psky")


@dataclass(frozen=True)
class Policy:
    """``no_filtering`` ships raw windows, ``fixed_threshold`` uses one constant
    alpha, ``sa_psky`` asks a trained actor.  ``actor`` is a ``DdpgAgent`` or a
    checkpoint path."""

    kind: str
    fixed_alpha: float | None = None
    actor: object = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "fixed_threshold":
            if self.fixed_alpha is None or not 0.0 <= self.fixed_alpha <= 1.0:
                raise ValueError("fixed_threshold needs fixed_alpha in [0, 1]")
        if self.kind == "sa_psky":
            if self.actor is None:
                raise ValueError("sa_psky needs a trained actor or checkpoint")
            if not hasattr(self.actor, "select_action"):
                from .agent import DdpgAgent
                object.__setattr__(self, "actor", DdpgAgent.load(self.actor))

    @property
    def label(self) -> str:
        if self.kind == "fixed_threshold":
            return f"fixed_threshold_{self.fixed_alpha:g}"
        return self.kind


def decide(policy: Policy, state: np.ndarray, k: int, alpha_min: float, alpha_max: float) -> Action:
    if policy.kind == "no_filtering":
        return Action(np.full(k, alpha_min), alpha_min, alpha_max, raw=True)
    if policy.kind == "fixed_threshold":
        # the fixed threshold is applied as given, outside the agent's action range if need be
        return Action(np.full(k, policy.fixed_alpha), 0.0, 1.0)
    return policy.actor.select_action(state, explore=False)

"""Synthetic uncertain-object streams for the edge nodes.

Each object is a small discrete distribution over ``m`` points in ``[0, 1]^d``
(lower is better on every attribute).  Object centers follow one of the usual
skyline benchmark families (independent, correlated, anti-correlated) and the
instances are Gaussian scatter around the center.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DISTRIBUTIONS = ("independent", "correlated", "anti_correlated")


@dataclass(frozen=True)
class Instance:
    values: tuple
    probability: float

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValueError("instance needs at least one dimension")
        if not self.probability > 0:
            raise ValueError("instance probability must be positive")


@dataclass(eq=False)
class UncertainObject:
    """An uncertain object: ``values[j]`` is instance j, ``probs[j]`` its mass."""

    object_id: int
    node_id: int
    arrival_step: int
    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        self.probs = np.asarray(self.probs, dtype=float).reshape(-1)
        if self.values.shape[0] != self.probs.shape[0]:
            raise ValueError("one probability per instance is required")
        if self.values.shape[0] < 1 or self.values.shape[1] < 1:
            raise ValueError("object needs m >= 1 instances of d >= 1 values")
        if np.any(self.probs <= 0):
            raise ValueError("instance probabilities must be positive")
        if self.probs.sum() > 1 + 1e-9:
            raise ValueError(f"instance probabilities sum to {self.probs.sum()} > 1")

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def instances(self) -> list[Instance]:
        return [Instance(tuple(float(x) for x in v), float(p))
                for v, p in zip(self.values, self.probs)]

    @property
    def center(self) -> np.ndarray:
        return self.values.mean(axis=0)

    @classmethod
    def from_instances(cls, object_id, node_id, arrival_step, instances: Sequence[Instance]):
        return cls(object_id, node_id, arrival_step,
                   np.array([i.values for i in instances], dtype=float),
                   np.array([i.probability for i in instances], dtype=float))


@dataclass(frozen=True)
class StreamConfig:
    distribution: str = "independent"
    m: int = 3
    d: int = 3
    lam: float = 2.0                # mean arrivals per step per node
    instance_spread: float = 0.05   # std-dev of instance scatter
    seed: int = 0
    random_instance_probs: bool = False
    ghost_mass: float = 0.0         # probability that an object does not exist
    corr_noise: float = 0.1         # scatter around the diagonal (correlated)
    anti_corr_spread: float = 0.05  # std-dev of the plane offset (anti-correlated)

    def __post_init__(self):
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {DISTRIBUTIONS}")
        if self.m < 1 or self.d < 1:
            raise ValueError("m and d must be >= 1")
        if not self.lam > 0:
            raise ValueError("lam must be > 0")
        if self.instance_spread < 0:
            raise ValueError("instance_spread must be >= 0")
        if not 0 <= self.ghost_mass < 1:
            raise ValueError("ghost_mass must lie in [0, 1)")


def step_rng(seed: int, node_id: int, step: int, stream: int = 0) -> np.random.Generator:
    """Generator for one (seed, node, step) cell, independent of any other cell.

    ``stream`` separates auxiliary histories (e.g. window prefill) from the
    main arrival stream.
    """
    return np.random.default_rng([seed, node_id, step, stream])


def sample_centers(rng: np.random.Generator, config: StreamConfig, n: int) -> np.ndarray:
    d = config.d
    if config.distribution == "independent":
        c = rng.random((n, d))
    elif config.distribution == "correlated":
        t = rng.random((n, 1))
        c = t + rng.normal(0.0, config.corr_noise, (n, d))
    else:
        # uniform point shifted onto a plane sum(x) = d * v, v close to 0.5
        u = rng.random((n, d))
        v = rng.normal(0.5, config.anti_corr_spread, (n, 1))
        c = u - u.mean(axis=1, keepdims=True) + v
    return np.clip(c, 0.0, 1.0)


def _instance_probs(rng, config: StreamConfig) -> np.ndarray:
    mass = 1.0 - config.ghost_mass
    if config.random_instance_probs:
        w = rng.gamma(1.0, 1.0, config.m) + 1e-12
        return mass * w / w.sum()
    return np.full(config.m, mass / config.m)


def generate_object(rng: np.random.Generator, config: StreamConfig, object_id: int,
                    node_id: int, arrival_step: int) -> UncertainObject:
    center = sample_centers(rng, config, 1)[0]
    scatter = rng.normal(0.0, 1.0, (config.m, config.d)) * config.instance_spread
    values = np.clip(center + scatter, 0.0, 1.0)
    return UncertainObject(object_id, node_id, arrival_step, values, _instance_probs(rng, config))


def arrivals_at_step(rng: np.random.Generator, config: StreamConfig, step: int) -> int:
    return int(rng.poisson(config.lam))


def generate_step(config: StreamConfig, node_id: int, step: int, first_id: int,
                  limit: int | None = None, stream: int = 0) -> list[UncertainObject]:
    """All objects arriving at ``node_id`` during ``step``.

    ``limit`` truncates the batch (used when a run has a total object budget).
    """
    rng = step_rng(config.seed, node_id, step, stream)
    n = arrivals_at_step(rng, config, step)
    if limit is not None:
        n = min(n, limit)
    return [generate_object(rng, config, first_id + k, node_id, step) for k in range(n)]


def write_objects_csv(path, objects: Iterable[UncertainObject]) -> None:
    """Dump objects as ``object_id,node_id,arrival_step,instance_index,prob,v1..vd``."""
    objects = list(objects)
    d = objects[0].d if objects else 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["object_id", "node_id", "arrival_step", "instance_index", "prob"]
                   + [f"v{k + 1}" for k in range(d)])
        for obj in objects:
            for j in range(obj.m):
                w.writerow([obj.object_id, obj.node_id, obj.arrival_step, j, repr(float(obj.probs[j]))]
                           + [repr(float(x)) for x in obj.values[j]])


def read_objects_csv(path) -> list[UncertainObject]:
    rows: dict[int, dict] = {}
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            oid = int(rec["object_id"])
            entry = rows.setdefault(oid, {"node": int(rec["node_id"]), "step": int(rec["arrival_step"]),
                                          "vals": [], "probs": []})
            entry["probs"].append(float(rec["prob"]))
            entry["vals"].append([float(rec[k]) for k in rec if k.startswith("v")])
    return [UncertainObject(oid, e["node"], e["step"], np.array(e["vals"]), np.array(e["probs"]))
            for oid, e in rows.items()]

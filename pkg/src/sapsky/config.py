"""Experiment configuration: flat ``key: value`` YAML with validated defaults.

Defaults describe the full-scale workload (50,000 objects, K=5, 1 Kbit
objects, 1 Mbps uplink, m=3, d=3, W_max=500) and the agent
hyper-parameters.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

from .cost_model import CostParams
from .data_gen import DISTRIBUTIONS, StreamConfig

SCENARIOS = ("default", "sweep_m", "sweep_d", "synthetic_convex")
DESK_OBJECTS = 5000


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str = "default"
    seed: int = 0
    # workload
    total_objects: int = 50_000
    k_nodes: int = 5
    w_max: int = 500
    m: int = 3
    d: int = 3
    distribution: str = "independent"
    lam: float = 2.0                 # arrivals per step per node
    step_seconds: float = 0.01       # wall-clock length of one step
    instance_spread: float = 0.05
    random_instance_probs: bool = False
    ghost_mass: float = 0.0
    corr_noise: float = 0.1
    anti_corr_spread: float = 0.05
    # network / cost
    omega_bits: float = 1000.0
    bandwidth_bps: float = 1e6
    bandwidth_schedule: tuple = ()
    kappa: float = 1e-7
    mu: float | None = None          # None: calibrated to target_rho under No-Filtering
    target_rho: float = 0.9
    w1: float = 0.5
    w2: float = 0.5
    c_max: float | None = None       # None: profiled
    l_max: float | None = None
    profile_steps: int = 50
    query_alpha: float = 0.02
    # MDP
    alpha_min: float = 0.001
    alpha_max: float = 0.9
    instability_penalty: float = 10.0
    gamma: float = 0.99
    t_max: int = 50
    warmup_steps: int = 10
    feature_horizon: int = 5
    prefill: bool = False            # start training episodes with full windows
    # agent
    hidden: tuple = (400, 300, 200)
    lr_actor: float = 1e-4
    lr_critic: float = 1e-3
    tau: float = 0.005
    batch_size: int = 128
    buffer_size: int = 1_000_000
    optimizer: str = "sgd"
    grad_clip: float = 1.0
    ou_theta: float = 0.15
    ou_sigma: float = 0.2
    ou_sigma_decay: float = 0.995
    ou_sigma_min: float = 0.01
    per_alpha: float = 0.6
    per_beta0: float = 0.4
    per_beta1: float = 1.0
    per_eps: float = 1e-3
    epsilon_greedy: bool = False
    epsilon0: float = 0.8
    epsilon_decay: float = 0.99
    episodes: int = 300
    # evaluation
    fixed_alpha: float = 0.02
    repeats: int = 5
    sweep_m: tuple = (3, 5, 7, 9)
    sweep_d: tuple = (3, 5, 7, 9)
    workers: int = 1
    # synthetic convex scenario
    synth_load_min: float = 10.0
    synth_load_max: float = 100.0
    synth_alpha_scale: float = 4.0   # optimum alpha = scale / load
    synth_phi_floor: float = 0.05

    def __post_init__(self):
        errs = []

        def need(cond, key, msg):
            if not cond:
                errs.append(f"{key}: {msg}")

        need(self.scenario in SCENARIOS, "scenario", f"must be one of {SCENARIOS}")
        need(self.distribution in DISTRIBUTIONS, "distribution", f"must be one of {DISTRIBUTIONS}")
        for key in ("k_nodes", "w_max", "m", "d", "t_max", "batch_size", "buffer_size", "feature_horizon",
                    "repeats", "workers"):
            need(getattr(self, key) >= 1, key, "must be >= 1")
        for key in ("total_objects", "episodes", "warmup_steps", "profile_steps"):
            need(getattr(self, key) >= 0, key, "must be >= 0")
        for key in ("lam", "step_seconds", "omega_bits", "bandwidth_bps", "kappa", "w1", "w2",
                    "lr_actor", "lr_critic", "instability_penalty", "grad_clip"):
            need(getattr(self, key) > 0, key, "must be > 0")
        for key in ("mu", "c_max", "l_max"):
            v = getattr(self, key)
            need(v is None or v > 0, key, "must be > 0 when given")
        need(abs(self.w1 + self.w2 - 1) < 1e-9, "w1", "w1 + w2 must equal 1")
        need(0 <= self.alpha_min < self.alpha_max <= 1, "alpha_min", "need 0 <= alpha_min < alpha_max <= 1")
        need(0 <= self.gamma <= 1, "gamma", "must lie in [0, 1]")
        need(0 < self.tau <= 1, "tau", "must lie in (0, 1]")
        need(0 < self.target_rho < 1, "target_rho", "must lie in (0, 1)")
        need(0 <= self.fixed_alpha <= 1, "fixed_alpha", "must lie in [0, 1]")
        need(0 <= self.query_alpha <= 1, "query_alpha", "must lie in [0, 1]")
        need(self.optimizer in ("sgd", "adam"), "optimizer", "must be 'sgd' or 'adam'")
        need(self.instance_spread >= 0, "instance_spread", "must be >= 0")
        need(0 <= self.ghost_mass < 1, "ghost_mass", "must lie in [0, 1)")
        need(all(b > 0 for b in self.bandwidth_schedule), "bandwidth_schedule", "entries must be > 0")
        need(len(self.hidden) >= 2 and all(h >= 1 for h in self.hidden), "hidden", "need >= 2 positive widths")
        need(len(self.sweep_m) > 0 and all(v >= 1 for v in self.sweep_m), "sweep_m", "non-empty, >= 1")
        need(len(self.sweep_d) > 0 and all(v >= 1 for v in self.sweep_d), "sweep_d", "non-empty, >= 1")
        need(0 < self.synth_load_min < self.synth_load_max, "synth_load_min", "need 0 < min < max")
        need(0 < self.synth_phi_floor < 1, "synth_phi_floor", "must lie in (0, 1)")
        if errs:
            raise ConfigError("invalid config: " + "; ".join(errs))

    # derived views -------------------------------------------------------
    def stream_config(self) -> StreamConfig:
        return StreamConfig(self.distribution, self.m, self.d, self.lam, self.instance_spread, self.seed,
                            self.random_instance_probs, self.ghost_mass, self.corr_noise, self.anti_corr_spread)

    @property
    def arrival_rate(self) -> float:
        """Per-node raw arrival rate in objects/s."""
        return self.lam / self.step_seconds

    @property
    def broker_mu(self) -> float:
        if self.mu is not None:
            return self.mu
        return self.k_nodes * self.arrival_rate / self.target_rho

    def cost_params(self, c_max=1.0, l_max=1.0) -> CostParams:
        return CostParams(self.kappa, self.omega_bits, self.bandwidth_bps, self.broker_mu, self.w1, self.w2,
                          self.c_max or c_max, self.l_max or l_max)

    def bandwidth_at(self, step: int) -> float:
        if self.bandwidth_schedule:
            return float(self.bandwidth_schedule[step % len(self.bandwidth_schedule)])
        return self.bandwidth_bps

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **_coerce(changes))

    def to_dict(self) -> dict:
        return {f.name: (list(v) if isinstance(v := getattr(self, f.name), tuple) else v) for f in fields(self)}

    def hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


_FIELDS = {f.name: f for f in fields(ExperimentConfig)}


def _coerce(raw: dict) -> dict:
    out = {}
    for key, value in raw.items():
        if key not in _FIELDS:
            raise ConfigError(f"unknown config key: {key!r}")
        default = _FIELDS[key].default
        if isinstance(default, tuple):
            value = tuple(value) if isinstance(value, (list, tuple)) else (value,)
        elif isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(f"{key}: expected true/false, got {value!r}")
        elif isinstance(default, int) and not isinstance(default, bool):
            if isinstance(value, float) and value.is_integer():
                value = int(value)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"{key}: expected an integer, got {value!r}")
        elif isinstance(default, float) or default is None and key != "scenario":
            if value is not None:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigError(f"{key}: expected a number, got {value!r}")
                value = float(value)
        elif isinstance(default, str) and not isinstance(value, str):
            raise ConfigError(f"{key}: expected a string, got {value!r}")
        out[key] = value
    return out


def config_from_dict(raw: dict | None) -> ExperimentConfig:
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigError("config must be a flat mapping of key: value")
    return ExperimentConfig(**_coerce(raw))


def load_config(path) -> ExperimentConfig:
    text = Path(path).read_text()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return config_from_dict(raw)


def desk_config(**overrides) -> ExperimentConfig:
    """Ten-percent data volume used for acceptance runs.

    Per-step work depends only on window occupancy, so computation and
    transmission totals both scale linearly with the object budget and the
    bandwidth needs no rescaling to keep their ratio.
    """
    base = {"total_objects": DESK_OBJECTS}
    base.update(overrides)
    return config_from_dict(base)

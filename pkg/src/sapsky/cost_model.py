"""Edge/cloud cost quantities: computation, transmission, broker queue, totals."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class InstabilityError(ArithmeticError):
    """Broker queue is unstable (traffic intensity >= 1)."""

    def __init__(self, rho):
        super().__init__(f"broker queue unstable: rho={rho:.4g} >= 1")
        self.rho = rho


@dataclass(frozen=True)
class CostParams:
    kappa: float = 1e-7         # s per instance-pair-dimension test
    omega: float = 1000.0       # bits per candidate
    bandwidth: float = 1e6      # bits/s shared uplink
    mu: float = 1111.0          # broker service rate, objects/s
    w1: float = 0.5
    w2: float = 0.5
    c_max: float = 1.0          # s, normalises the summed computation
    l_max: float = 1.0          # s, normalises the system latency

    def __post_init__(self):
        for name in ("kappa", "omega", "bandwidth", "mu", "w1", "w2", "c_max", "l_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if abs(self.w1 + self.w2 - 1.0) > 1e-9:
            raise ValueError("w1 + w2 must equal 1")


@dataclass
class StepCosts:
    t_comp_per_node: np.ndarray
    t_trans_per_node: np.ndarray
    t_cloud: float
    l_sys: float
    total_cost: float
    rho: float
    selectivity_per_node: np.ndarray
    # the broker's share of t_cloud: queueing (M/M/1) and dominance checks
    t_cloud_queue: float = 0.0
    t_cloud_comp: float = 0.0
    candidates_per_node: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    stable: bool = True
    edge_comparisons: int = 0
    cloud_comparisons: int = 0

    @property
    def t_comp_total(self) -> float:
        return float(np.sum(self.t_comp_per_node)) + self.t_cloud_comp


def comp_time_measured(stats, d: int, params: CostParams) -> float:
    return params.kappa * stats.instance_pair_comparisons * d


def comp_time_model(n, m, d, phi, params: CostParams) -> float:
    if not 0 < phi <= 1:
        raise ValueError("phi must lie in (0, 1]")
    return params.kappa * n * n * phi * m * m * d


def trans_time(candidate_count, params: CostParams) -> float:
    if candidate_count < 0:
        raise ValueError("candidate_count must be >= 0")
    return candidate_count * params.omega / params.bandwidth


def aggregate_arrival_rate(lambdas, selectivities) -> float:
    lambdas = np.asarray(lambdas, dtype=float)
    sel = np.asarray(selectivities, dtype=float)
    if np.any((sel < 0) | (sel > 1)):
        raise ValueError("selectivities must lie in [0, 1]")
    return float(np.dot(lambdas, sel))


def traffic_intensity(arrival_rate, params: CostParams) -> float:
    return arrival_rate / params.mu


def cloud_time(arrival_rate, params: CostParams) -> float:
    """Mean M/M/1 sojourn (wait + service) at the broker."""
    rho = traffic_intensity(arrival_rate, params)
    if rho >= 1:
        raise InstabilityError(rho)
    return 1.0 / (params.mu - arrival_rate)


def system_latency(t_comps, t_transs, t_cloud) -> float:
    """Slowest edge node, plus the serialised uplink, plus the broker."""
    t_comps = np.asarray(t_comps, dtype=float)
    return (float(t_comps.max()) if t_comps.size else 0.0) + float(np.sum(t_transs)) + t_cloud


def total_cost(sum_t_comp, l_sys, params: CostParams) -> float:
    return params.w1 * sum_t_comp / params.c_max + params.w2 * l_sys / params.l_max


def simulate_mm1(arrival_rate, service_rate, n_arrivals, rng) -> float:
    """Mean sojourn time of a FIFO single-server queue with Poisson arrivals.

    Event-by-event Lindley recursion: each customer waits for the previous
    one's departure, so ``depart[k] = max(arrive[k], depart[k-1]) + service[k]``.
    """
    arrive = np.cumsum(rng.exponential(1.0 / arrival_rate, n_arrivals))
    service = rng.exponential(1.0 / service_rate, n_arrivals)
    depart = 0.0
    total = 0.0
    for a, s in zip(arrive.tolist(), service.tolist()):
        depart = (a if a > depart else depart) + s
        total += depart - a
    return total / n_arrivals

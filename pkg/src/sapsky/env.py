"""Edge-cloud threshold-control environment.

One ``step`` advances every edge node by one time slot: the node ingests its
Poisson arrivals, re-filters its window at its own threshold and ships the
candidates that newly entered its candidate set.  The broker then checks the
candidates against those of the other nodes.  The step's costs follow the
computation / transmission / M-M-1 model in :mod:`sapsky.cost_model`.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import cost_model as cm
from .config import ExperimentConfig
from .data_gen import generate_step
from .skyline import CachedWindowFilter, Candidate, DominanceStats, broker_comparisons, global_aggregate
from .window import SlidingWindow


@dataclass
class SystemState:
    lambdas: np.ndarray
    sigmas: np.ndarray
    density: np.ndarray
    bandwidth: float
    queue_status: float

    @classmethod
    def zeros(cls, k):
        return cls(np.zeros(k), np.zeros(k), np.zeros(k), 0.0, 0.0)


@dataclass
class Action:
    alphas: np.ndarray
    alpha_min: float = 0.0
    alpha_max: float = 1.0
    raw: bool = False    # ship whole windows, no edge-side dominance checks

    def __post_init__(self):
        self.alphas = np.clip(np.asarray(self.alphas, dtype=float).reshape(-1), self.alpha_min, self.alpha_max)


@dataclass
class RewardConfig:
    alpha_min: float = 0.001
    alpha_max: float = 0.9
    instability_penalty: float = 10.0
    gamma: float = 0.99
    t_max: int = 50

    def __post_init__(self):
        if not self.alpha_min < self.alpha_max:
            raise ValueError("alpha_min must be < alpha_max")

    @classmethod
    def from_config(cls, cfg: ExperimentConfig):
        return cls(cfg.alpha_min, cfg.alpha_max, cfg.instability_penalty, cfg.gamma, cfg.t_max)


@dataclass
class StateScales:
    lam: float
    sigma: float
    bandwidth: float

    @classmethod
    def from_config(cls, cfg: ExperimentConfig):
        spread2 = cfg.instance_spread ** 2
        return cls(2.0 * cfg.lam, 2.0 * spread2 if spread2 > 0 else 1.0, cfg.bandwidth_bps)


def state_vector(state: SystemState, scales: StateScales) -> np.ndarray:
    """Flatten to ``[lambdas, sigmas, density, bandwidth, queue]`` (length 3K+2)."""
    return np.concatenate([
        np.asarray(state.lambdas, dtype=float) / scales.lam,
        np.asarray(state.sigmas, dtype=float) / scales.sigma,
        np.asarray(state.density, dtype=float),
        [state.bandwidth / scales.bandwidth, state.queue_status],
    ])


def _instance_variance(objs) -> float:
    return float(np.mean([o.values.var(axis=0).mean() for o in objs]))


def _center_correlation(centers: np.ndarray) -> float:
    """Mean off-diagonal Pearson correlation between the attributes."""
    n, d = centers.shape
    if n < 3 or d < 2:
        return 0.0
    sd = centers.std(axis=0)
    if np.any(sd == 0):
        return 0.0
    c = np.corrcoef(centers, rowvar=False)
    return float((c.sum() - d) / (d * (d - 1)))


class _Node:
    def __init__(self, node_id, capacity, horizon):
        self.node_id = node_id
        self.window = SlidingWindow(capacity, node_id)
        self.cache = CachedWindowFilter()
        self.shipped: set[int] = set()
        self.arrivals = deque(maxlen=horizon)
        self.scatter = deque(maxlen=horizon)
        self.corr = deque(maxlen=horizon)
        self.candidates: list[Candidate] = []


class EdgeCloudEnv:
    """Seeded simulator of K edge nodes feeding one broker."""

    def __init__(self, config: ExperimentConfig, profile: bool = True):
        self.config = config
        self.reward_cfg = RewardConfig.from_config(config)
        self.scales = StateScales.from_config(config)
        self.k = config.k_nodes
        self.state_width = 3 * self.k + 2
        self.params = config.cost_params()
        if profile and (config.c_max is None or config.l_max is None):
            c_max, l_max = profile_normalisers(config)
            self.params = config.cost_params(c_max, l_max)
        self.trace = None
        self.reset(config.seed, warmup_steps=0)

    # episode protocol ------------------------------------------------------
    def reset(self, seed: int | None = None, warmup_steps: int | None = None, prefill: bool | None = None):
        cfg = self.config
        self.seed = cfg.seed if seed is None else seed
        self.stream = cfg.replace(seed=self.seed).stream_config()
        self.nodes = [_Node(i + 1, cfg.w_max, cfg.feature_horizon) for i in range(self.k)]
        self.stream_step = 0
        self.next_id = 0
        self.generated = 0
        self.t = 0
        self.done = False
        self.last_rho = 0.0
        self.last_bandwidth = cfg.bandwidth_at(0)
        self.budget = None
        if prefill if prefill is not None else cfg.prefill:
            self._prefill()
        steps = cfg.warmup_steps if warmup_steps is None else warmup_steps
        neutral = 0.5 * (cfg.alpha_min + cfg.alpha_max)
        for _ in range(steps):
            self._advance(np.full(self.k, neutral), raw=False)
        self.t = 0
        return self.state

    def set_budget(self, total_objects: int | None):
        """Stop generating arrivals once ``total_objects`` have entered the system."""
        self.budget = total_objects

    @property
    def exhausted(self) -> bool:
        return self.budget is not None and self.generated >= self.budget

    def step(self, action: Action | np.ndarray):
        if self.done:
            raise RuntimeError("episode finished; call reset()")
        action = self._as_action(action)
        costs = self._advance(action.alphas, action.raw)
        reward = -costs.total_cost
        if not costs.stable:
            reward -= self.reward_cfg.instability_penalty
        self.t += 1
        self.done = self.t >= self.reward_cfg.t_max
        if self.trace is not None:
            self.trace.append((self.t, action.alphas.copy(), reward, costs))
        return self.state, reward, self.done, costs

    def apply(self, action: Action | np.ndarray) -> cm.StepCosts:
        """Advance one slot outside the episode protocol (evaluation runs)."""
        action = self._as_action(action)
        return self._advance(action.alphas, action.raw)

    # internals ----------------------------------------------------------------
    def _as_action(self, action):
        if isinstance(action, Action):
            return action
        return Action(action, self.reward_cfg.alpha_min, self.reward_cfg.alpha_max)

    def _arrivals(self, node: _Node):
        limit = None
        if self.budget is not None:
            limit = max(0, self.budget - self.generated)
        objs = generate_step(self.stream, node.node_id, self.stream_step, self.next_id, limit)
        self.next_id += len(objs)
        self.generated += len(objs)
        return objs

    def _ingest(self, node: _Node, objs):
        evicted = 0
        for o in objs:
            if node.window.insert(o) is not None:
                evicted += 1
        node.cache.update(objs, evicted)

    def _prefill(self):
        # separate history stream, stamped with negative steps
        cfg = self.config
        for node in self.nodes:
            objs, step = [], 0
            while len(objs) < cfg.w_max:
                objs.extend(generate_step(self.stream, node.node_id, step, 0, stream=1))
                step += 1
            objs = objs[:cfg.w_max]
            for o in objs:
                o.object_id = self.next_id
                o.arrival_step -= step
                self.next_id += 1
            self._ingest(node, objs)

    def _advance(self, alphas, raw: bool) -> cm.StepCosts:
        cfg, params = self.config, self.params
        alphas = np.asarray(alphas, dtype=float)
        bandwidth = cfg.bandwidth_at(self.stream_step)
        step_params = params if bandwidth == params.bandwidth else _with_bandwidth(params, bandwidth)
        t_comp = np.zeros(self.k)
        t_trans = np.zeros(self.k)
        sel = np.zeros(self.k)
        sizes = np.zeros(self.k, dtype=int)
        shipped_now = np.zeros(self.k, dtype=int)
        edge_ops = 0
        for i, node in enumerate(self.nodes):
            objs = self._arrivals(node)
            self._ingest(node, objs)
            node.arrivals.append(len(objs))
            if objs:
                node.scatter.append(_instance_variance(objs))
            window = node.cache.objects
            node.corr.append(_center_correlation(node.cache.centers) if window else 0.0)
            if raw:
                node.candidates = [Candidate(o, None) for o in window]
            else:
                stats = DominanceStats()
                node.candidates = node.cache.filter(float(alphas[i]), stats)
                t_comp[i] = cm.comp_time_measured(stats, cfg.d, step_params)
                edge_ops += stats.instance_pair_comparisons
            ids = {c.object.object_id for c in node.candidates}
            shipped_now[i] = len(ids - node.shipped)
            node.shipped = ids
            sizes[i] = len(ids)
            sel[i] = sizes[i] / len(window) if window else 0.0
            t_trans[i] = cm.trans_time(shipped_now[i], step_params)
        cloud_ops = broker_comparisons(sizes.tolist(), cfg.m, raw)
        t_cloud_comp = step_params.kappa * cloud_ops * cfg.d
        arrival = cm.aggregate_arrival_rate(np.full(self.k, cfg.arrival_rate), sel)
        rho = cm.traffic_intensity(arrival, step_params)
        try:
            t_queue = cm.cloud_time(arrival, step_params)
            stable = True
        except cm.InstabilityError:
            t_queue, stable = 0.0, False
        t_cloud = t_queue + t_cloud_comp
        l_sys = cm.system_latency(t_comp, t_trans, t_cloud)
        total = cm.total_cost(float(t_comp.sum()) + t_cloud_comp, l_sys, step_params)
        self.last_rho = rho
        self.last_bandwidth = bandwidth
        self.stream_step += 1
        return cm.StepCosts(t_comp, t_trans, t_cloud, l_sys, total, rho, sel, t_queue, t_cloud_comp,
                            shipped_now, stable, edge_ops, cloud_ops)

    @property
    def state(self) -> SystemState:
        return SystemState(
            np.array([np.mean(n.arrivals) if n.arrivals else 0.0 for n in self.nodes]),
            np.array([np.mean(n.scatter) if n.scatter else 0.0 for n in self.nodes]),
            np.array([np.mean(n.corr) if n.corr else 0.0 for n in self.nodes]),
            float(self.last_bandwidth),
            float(self.last_rho),
        )

    def observe(self) -> np.ndarray:
        return state_vector(self.state, self.scales)

    def global_skyline(self, alpha: float | None = None):
        """Broker result for the candidate sets shipped in the latest step."""
        alpha = self.config.query_alpha if alpha is None else alpha
        return global_aggregate([n.candidates for n in self.nodes], alpha)


def _with_bandwidth(params: cm.CostParams, bandwidth: float) -> cm.CostParams:
    from dataclasses import replace
    return replace(params, bandwidth=bandwidth)


_PROFILE_CACHE: dict[str, tuple[float, float]] = {}


def profile_normalisers(config: ExperimentConfig) -> tuple[float, float]:
    """Largest summed computation and system latency seen while profiling.

    Runs ``profile_steps`` steps from full windows at alpha=0 and again at
    ``alpha_max``; the maxima become the reward normalisers.
    """
    key = config.hash()
    if key in _PROFILE_CACHE:
        return _PROFILE_CACHE[key]
    probe = config.replace(c_max=1.0, l_max=1.0)
    env = EdgeCloudEnv(probe, profile=False)
    c_max = l_max = 0.0
    for alpha in (0.0, config.alpha_max):
        env.reset(config.seed + 7919, warmup_steps=0, prefill=True)
        for _ in range(config.profile_steps):
            costs = env._advance(np.full(env.k, alpha), raw=False)
            c_max = max(c_max, costs.t_comp_total)
            l_max = max(l_max, costs.l_sys)
    result = (c_max or 1.0, l_max or 1.0)
    _PROFILE_CACHE[key] = result
    return result


class SyntheticConvexEnv:
    """Analytic testbed with a known optimal threshold for every state.

    Each node draws an independent load ``n`` every step.  Its cost is the
    closed-form computation time with a pruning factor that grows with the
    threshold, ``phi(a) = f + (1 - f) a^2``, plus the transmission time of the
    surviving fraction ``1 - a``, both divided by the node's unpruned
    computation time so every load contributes on the same scale.  The
    bandwidth is chosen so the per-node optimum is ``synth_alpha_scale / n``.
    Node costs add up, so the joint optimum is the per-node optimum.
    """

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.reward_cfg = RewardConfig.from_config(config)
        self.k = config.k_nodes
        self.state_width = 3 * self.k + 2
        f = config.synth_phi_floor
        bandwidth = config.w2 * config.omega_bits / (2 * config.w1 * config.kappa * (1 - f) * config.m ** 2
                                                     * config.d * config.synth_alpha_scale)
        self.params = cm.CostParams(config.kappa, config.omega_bits, bandwidth, 1.0, config.w1, config.w2)
        self.reset(config.seed)

    def node_cost(self, loads, alphas):
        cfg, f = self.config, self.config.synth_phi_floor
        loads = np.asarray(loads, dtype=float)
        alphas = np.asarray(alphas, dtype=float)
        full = self.params.kappa * loads ** 2 * cfg.m ** 2 * cfg.d
        trans = loads * (1 - alphas) * self.params.omega / self.params.bandwidth
        return self.params.w1 * (f + (1 - f) * alphas ** 2) + self.params.w2 * trans / full

    def optimal_alphas(self, loads, grid=None):
        """Grid-search oracle for the per-node optimum."""
        if grid is None:
            grid = np.linspace(self.reward_cfg.alpha_min, self.reward_cfg.alpha_max, 2001)
        loads = np.asarray(loads, dtype=float)
        costs = self.node_cost(loads[:, None], grid[None, :])
        return grid[np.argmin(costs, axis=1)]

    def reset(self, seed=None):
        self.rng = np.random.default_rng([self.config.seed if seed is None else seed, 1])
        self.t = 0
        self.done = False
        self.loads = self._draw()
        return self.observe()

    def _draw(self):
        return self.rng.uniform(self.config.synth_load_min, self.config.synth_load_max, self.k)

    def observe(self) -> np.ndarray:
        return self.features(self.loads)

    def features(self, loads) -> np.ndarray:
        z = np.zeros(self.k)
        return np.concatenate([np.asarray(loads) / self.config.synth_load_max, z, z, [1.0, 0.0]])

    def step(self, action):
        if self.done:
            raise RuntimeError("episode finished; call reset()")
        alphas = action.alphas if isinstance(action, Action) else np.asarray(action, dtype=float)
        alphas = np.clip(alphas, self.reward_cfg.alpha_min, self.reward_cfg.alpha_max)
        reward = -float(self.node_cost(self.loads, alphas).sum())
        self.loads = self._draw()
        self.t += 1
        self.done = self.t >= self.reward_cfg.t_max
        return self.observe(), reward, self.done, None

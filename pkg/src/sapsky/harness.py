"""Experiment orchestration: evaluation runs, sweeps, training and self-checks."""
from __future__ import annotations

import datetime as _dt
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import skyline
from .config import ExperimentConfig
from .policies import Policy, decide

OUT_ENV = "SAPSKY_OUT"


def output_dir(path=None) -> Path:
    out = Path(path or os.environ.get(OUT_ENV, "sapsky_out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


@dataclass
class RunReport:
    """Totals of one streamed run.  Times are summed over steps in seconds."""

    policy: str
    seed: int
    config_hash: str
    steps: int = 0
    objects: int = 0
    t_comp_parallel: float = 0.0   # per-step maximum over nodes
    t_comp_edges: float = 0.0      # summed over nodes
    t_trans: float = 0.0
    t_cloud: float = 0.0
    t_cloud_queue: float = 0.0
    t_cloud_comp: float = 0.0
    e2e: float = 0.0
    candidates: int = 0
    edge_comparisons: int = 0
    cloud_comparisons: int = 0
    unstable_steps: int = 0
    mean_alpha: float = 0.0

    def composition_error(self) -> float:
        return abs(self.e2e - (self.t_comp_parallel + self.t_trans + self.t_cloud))

    def add(self, costs, alphas) -> None:
        self.steps += 1
        self.t_comp_parallel += float(np.max(costs.t_comp_per_node))
        self.t_comp_edges += float(np.sum(costs.t_comp_per_node))
        self.t_trans += float(np.sum(costs.t_trans_per_node))
        self.t_cloud += costs.t_cloud
        self.t_cloud_queue += costs.t_cloud_queue
        self.t_cloud_comp += costs.t_cloud_comp
        self.e2e += costs.l_sys
        self.candidates += int(np.sum(costs.candidates_per_node))
        self.edge_comparisons += int(costs.edge_comparisons)
        self.cloud_comparisons += int(costs.cloud_comparisons)
        self.unstable_steps += int(not costs.stable)
        self.mean_alpha += (float(np.mean(alphas)) - self.mean_alpha) / self.steps


REPORT_FIELDS = [f.name for f in fields(RunReport)]
TRACE_FIELDS = ["step", "mean_alpha", "t_comp_max", "t_trans", "t_cloud", "l_sys", "candidates", "rho",
                "stable"]


def run_experiment(config: ExperimentConfig, policy: Policy, seed: int | None = None, trace=None) -> RunReport:
    """Stream ``config.total_objects`` objects through the pipeline under ``policy``.

    ``trace`` may be a list that receives one row per step.
    """
    from .env import EdgeCloudEnv

    seed = config.seed if seed is None else seed
    report = RunReport(policy.label, seed, config.hash())
    if config.total_objects == 0:
        return report
    env = EdgeCloudEnv(config, profile=False)
    env.reset(seed, warmup_steps=0, prefill=False)
    env.set_budget(config.total_objects)
    while not env.exhausted:
        action = decide(policy, env.observe(), env.k, config.alpha_min, config.alpha_max)
        costs = env.apply(action)
        report.add(costs, action.alphas)
        if trace is not None:
            trace.append([report.steps, float(np.mean(action.alphas)), float(np.max(costs.t_comp_per_node)),
                          float(np.sum(costs.t_trans_per_node)), costs.t_cloud, costs.l_sys,
                          int(np.sum(costs.candidates_per_node)), costs.rho, int(costs.stable)])
    report.objects = env.generated
    return report


def _run_job(job):
    config, policy, seed = job
    return run_experiment(config, policy, seed)


def _map(jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [_run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_job, jobs))


def run_repeats(config: ExperimentConfig, policies, repeats: int | None = None):
    """Reports for every policy over ``repeats`` consecutive seeds, grouped by policy label."""
    repeats = config.repeats if repeats is None else repeats
    jobs = [(config, p, config.seed + r) for p in policies for r in range(repeats)]
    reports = _map(jobs, config.workers)
    grouped: dict[str, list[RunReport]] = {}
    for rep in reports:
        grouped.setdefault(rep.policy, []).append(rep)
    return grouped


def summarize(reports) -> dict[str, tuple[float, float]]:
    """Mean and sample standard deviation of every numeric report field."""
    out = {}
    for name in REPORT_FIELDS[3:]:
        vals = np.array([getattr(r, name) for r in reports], dtype=float)
        out[name] = (float(vals.mean()), float(vals.std(ddof=1)) if len(vals) > 1 else 0.0)
    return out


def run_sweep(config: ExperimentConfig, axis: str, values, policies, repeats: int = 1, out=None,
              deterministic: bool = True):
    """One run per (value, policy, repeat) over identically seeded streams.

    Returns ``{value: {policy_label: [RunReport, ...]}}`` in the given order and
    writes ``metrics_sweep_<axis>.csv`` when ``out`` is set.
    """
    if axis not in ("m", "d"):
        raise ValueError("axis must be 'm' or 'd'")
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    jobs = [(config.replace(**{axis: v}), p, config.seed + r) for v in values for p in policies
            for r in range(repeats)]
    reports = iter(_map(jobs, config.workers))
    result = {}
    for v in values:
        result[v] = {}
        for p in policies:
            result[v][p.label] = [next(reports) for _ in range(repeats)]
    if out is not None:
        rows = [[axis, v, *_report_row(r)] for v in values for reps in result[v].values() for r in reps]
        write_csv(Path(out) / f"metrics_sweep_{axis}.csv", ["axis", "value", *REPORT_FIELDS], rows,
                  deterministic)
    return result


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _report_row(r: RunReport):
    return [getattr(r, f) for f in REPORT_FIELDS]


def write_csv(path, header, rows, deterministic: bool = True) -> None:
    """Write a CSV; a ``# generated`` timestamp line leads unless ``deterministic``."""
    with open(path, "w") as fh:
        if not deterministic:
            fh.write(f"# generated {_dt.datetime.now(_dt.timezone.utc).isoformat()}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def write_metrics(path, grouped, deterministic: bool = True) -> None:
    """Per-run rows followed by mean and std rows for each policy."""
    rows = []
    for label, reports in grouped.items():
        for r in reports:
            rows.append(["run", *_report_row(r)])
        summary = summarize(reports)
        head = [label, reports[0].seed, reports[0].config_hash]
        rows.append(["mean", *head, *[summary[f][0] for f in REPORT_FIELDS[3:]]])
        rows.append(["std", *head, *[summary[f][1] for f in REPORT_FIELDS[3:]]])
    write_csv(path, ["row", *REPORT_FIELDS], rows, deterministic)


def write_trace(path, trace, config_hash: str, seed: int, deterministic: bool = True) -> None:
    write_csv(path, [*TRACE_FIELDS, "config_hash", "seed"], [[*t, config_hash, seed] for t in trace],
              deterministic)


def evaluate(config: ExperimentConfig, policy: Policy, out=None, deterministic: bool = True):
    """Repeated runs of one policy; writes ``metrics_<scenario>.csv`` and ``report_<policy>.csv``."""
    out = output_dir(out)
    trace: list = []
    first = run_experiment(config, policy, config.seed, trace)
    rest = [run_experiment(config, policy, config.seed + r) for r in range(1, config.repeats)]
    grouped = {policy.label: [first, *rest]}
    write_metrics(out / f"metrics_{config.scenario}.csv", grouped, deterministic)
    write_trace(out / f"report_{policy.kind}.csv", trace, config.hash(), config.seed, deterministic)
    return grouped


# training -------------------------------------------------------------------

def make_env(config: ExperimentConfig):
    from .env import EdgeCloudEnv, SyntheticConvexEnv
    if config.scenario == "synthetic_convex":
        return SyntheticConvexEnv(config)
    return EdgeCloudEnv(config)


def train_agent(config: ExperimentConfig, episodes: int | None = None, out=None, deterministic: bool = True,
                callback=None):
    """Train on the configured scenario; writes ``training_log.csv`` and ``actor.json`` when ``out`` is set."""
    from .agent import AgentConfig, DdpgAgent, train, write_training_log

    env = make_env(config)
    agent = DdpgAgent(env.state_width, env.k, AgentConfig.from_experiment(config), seed=config.seed)
    episodes = config.episodes if episodes is None else episodes
    log = train(agent, env, episodes, config.t_max, seed=config.seed, callback=callback)
    if out is not None:
        out = output_dir(out)
        write_training_log(out / "training_log.csv", log, config.hash(), config.seed)
        agent.save(out / "actor.json")
    return agent, log


# self-checks ----------------------------------------------------------------

@dataclass
class BatteryResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"VERIFY {self.name} {'PASS' if self.passed else 'FAIL'} {self.detail}"


def _battery_oracle(config, rng):
    from .data_gen import StreamConfig, generate_step

    mismatches = cases = 0
    for trial in range(200):
        dist = ("independent", "correlated", "anti_correlated")[trial % 3]
        sc = StreamConfig(dist, int(rng.integers(1, 5)), int(rng.integers(1, 4)), lam=1.0,
                          instance_spread=0.1, seed=int(rng.integers(1 << 30)))
        objs = []
        n = int(rng.integers(2, 30))
        step = 0
        while len(objs) < n:
            objs.extend(generate_step(sc, 1, step, len(objs)))
            step += 1
        objs = objs[:n]
        oracle = dict(skyline.brute_force_skyline(objs))
        for alpha in (0.02, 0.1, 0.5):
            got = {c.object.object_id for c in skyline.local_filter(objs, alpha)}
            want = {i for i, p in oracle.items() if p >= alpha}
            cases += 1
            mismatches += got != want
    return mismatches == 0, f"cases={cases} mismatches={mismatches}"


def _battery_monotonicity(config, rng):
    from .data_gen import StreamConfig, generate_step

    worst = 0.0
    sc = StreamConfig("independent", 3, 3, lam=20.0, instance_spread=0.1, seed=config.seed)
    for trial in range(200):
        objs = generate_step(sc, 1, trial, 0)
        if len(objs) < 2:
            continue
        target = objs[0]
        keep = [o for o in objs[1:] if rng.random() < 0.5]
        full = skyline.skyline_probability(target, objs)
        sub = skyline.skyline_probability(target, [target, *keep])
        worst = max(worst, full - sub)
    return worst <= 1e-12, f"max_violation={worst:.3g}"


def _battery_mm1(config, rng):
    from .cost_model import simulate_mm1

    errs = []
    for rho, tol in ((0.5, 0.10), (0.9, 0.15)):
        mean = simulate_mm1(rho * 10.0, 10.0, 1_000_000, rng)
        errs.append((abs(mean - 1 / (10.0 - rho * 10.0)) / (1 / (10.0 - rho * 10.0)), tol))
    ok = all(e <= t for e, t in errs)
    return ok, " ".join(f"rel_err={e:.3f}/tol={t}" for e, t in errs)


def _battery_gradients(config, rng):
    from .agent import Mlp

    worst = 0.0
    for trial in range(5):
        net = Mlp([4, 5, 4, 3, 1], inject_width=2, inject_at=1, rng=rng)
        x, a, g = rng.normal(size=(3, 4)), rng.normal(size=(3, 2)), rng.normal(size=(3, 1))
        net.forward(x, a)
        grads, _, da = net.backward(g)
        h = 1e-6
        for p, gp in zip(net.params + [a], grads + [da]):
            for idx in np.ndindex(p.shape):
                old = p[idx]
                p[idx] = old + h
                up = float(np.sum(net.forward(x, a) * g))
                p[idx] = old - h
                down = float(np.sum(net.forward(x, a) * g))
                p[idx] = old
                num = (up - down) / (2 * h)
                worst = max(worst, abs(num - gp[idx]) / max(1e-8, abs(num) + abs(gp[idx])))
    return worst < 1e-4, f"max_rel_err={worst:.3g}"


BATTERIES = {
    "oracle": _battery_oracle,
    "monotonicity": _battery_monotonicity,
    "mm1": _battery_mm1,
    "gradients": _battery_gradients,
}


def verify(config: ExperimentConfig, batteries=None, stream=None) -> list[BatteryResult]:
    """Run the named self-check batteries (all by default) and print one line each."""
    names = list(BATTERIES) if batteries is None else list(batteries)
    results = []
    for name in names:
        if name not in BATTERIES:
            raise ValueError(f"unknown battery {name!r}")
        passed, detail = BATTERIES[name](config, np.random.default_rng([config.seed, len(results)]))
        res = BatteryResult(name, bool(passed), detail)
        results.append(res)
        if stream is not None:
            print(res.line(), file=stream)
    return results


def report_dict(report: RunReport) -> dict:
    return asdict(report)

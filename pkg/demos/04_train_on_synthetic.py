"""Training the threshold controller where the answer is known.

The synthetic convex scenario has a closed-form optimal threshold for every
node load.  A training run is compared with that optimum.  The full 300 episodes take about six minutes;
shorter runs (EPISODES=...) can stop while the actor is still saturated
at a bound.
"""
import os
from pathlib import Path

import numpy as np

from sapsky.config import load_config
from sapsky.env import SyntheticConvexEnv
from sapsky.harness import train_agent

EPISODES = int(os.environ.get("EPISODES", 300))
cfg = load_config(Path(__file__).resolve().parent.parent / "configs" / "synthetic_convex.yaml")
agent, log = train_agent(cfg, EPISODES, callback=lambda e: print(
    f"episode {e.episode:3d} return {e.ret:8.3f} mean alpha {e.mean_alpha:.3f}") if e.episode % 10 == 0 else None)

env = SyntheticConvexEnv(cfg)
rng = np.random.default_rng(123)
loads = rng.uniform(cfg.synth_load_min, cfg.synth_load_max, (200, cfg.k_nodes))
err = np.array([agent.select_action(env.features(l)).alphas - env.optimal_alphas(l) for l in loads])
print(f"thresholds within 0.05 of the optimum: {np.mean(np.abs(err) <= 0.05):.1%}")
for n in (15, 40, 90):
    a = agent.select_action(env.features(np.full(cfg.k_nodes, float(n)))).alphas.mean()
    print(f"load {n:3d}: learned {a:.3f}, optimal {cfg.synth_alpha_scale / n:.3f}")

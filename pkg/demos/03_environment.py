"""The edge-cloud environment under different thresholds.

Steps a small five-node system with full windows at three constant
thresholds and prints how selectivity, traffic intensity and the reward
respond.  Higher thresholds prune more and ship less.
"""
import numpy as np

from sapsky.config import desk_config
from sapsky.env import EdgeCloudEnv

cfg = desk_config(prefill=True, t_max=10)
env = EdgeCloudEnv(cfg)
print(f"state vector width {env.state_width}, normalisers c_max={env.params.c_max:.3f} l_max={env.params.l_max:.3f}")
for alpha in (0.02, 0.3, 0.9):
    env.reset(seed=1)
    rewards, sel, rho = [], [], []
    done = False
    while not done:
        _, r, done, costs = env.step(np.full(env.k, alpha))
        rewards.append(r)
        sel.append(costs.selectivity_per_node.mean())
        rho.append(costs.rho)
    print(f"alpha={alpha:<4}  mean selectivity {np.mean(sel):.3f}  mean rho {np.mean(rho):.3f}  "
          f"episode return {np.sum(rewards):.4f}")
print("observation:", np.round(env.observe(), 3))

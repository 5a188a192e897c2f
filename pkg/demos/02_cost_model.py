"""Latency model of one edge-cloud step and the broker queue.

Evaluates the closed-form computation and transmission times for a full
window, the M/M/1 broker sojourn time for several traffic intensities, and
checks that formula against a direct simulation of the queue.
"""
import numpy as np

from sapsky import cost_model as cm

params = cm.CostParams(kappa=1e-7, omega=1000, bandwidth=1e6, mu=1000.0)
n, m, d = 500, 3, 3
for phi in (1.0, 0.3, 0.05):
    print(f"window of {n}, pruning factor {phi:4}: computation "
          f"{cm.comp_time_model(n, m, d, phi, params):.4f} s")
print(f"shipping 50,000 one-kilobit objects over 1 Mbps: {cm.trans_time(50_000, params):.1f} s")

rng = np.random.default_rng(0)
for rho in (0.5, 0.8, 0.9):
    lam = rho * params.mu
    formula = cm.cloud_time(lam, params)
    simulated = cm.simulate_mm1(lam, params.mu, 1_000_000, rng)
    print(f"rho={rho}: 1/(mu-lambda) = {formula * 1e3:.3f} ms, simulated {simulated * 1e3:.3f} ms")

try:
    cm.cloud_time(1.2 * params.mu, params)
except cm.InstabilityError as exc:
    print(f"overloaded broker rejected: rho = {exc.rho:.2f}")

t_comp = np.array([0.20, 0.35, 0.15])
t_trans = np.array([0.01, 0.02, 0.01])
l_sys = cm.system_latency(t_comp, t_trans, 0.004)
print(f"system latency = slowest node + all uplinks + cloud = {l_sys:.3f} s")

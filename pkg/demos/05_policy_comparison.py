"""No filtering, a fixed threshold, and a learned controller on one stream.

Streams the desk-scale workload (5,000 objects) through five edge nodes
under each policy and decomposes the end-to-end latency.  All policies see
byte-identical arrivals.
"""
from sapsky.config import desk_config
from sapsky.harness import run_experiment, train_agent
from sapsky.policies import Policy

cfg = desk_config(optimizer="adam")
agent, _ = train_agent(cfg, episodes=10)
policies = [Policy("no_filtering"), Policy("fixed_threshold", fixed_alpha=0.02), Policy("sa_psky", actor=agent)]
print(f"{'policy':<24}{'comp':>10}{'trans':>10}{'cloud':>12}{'e2e':>12}{'shipped':>9}")
for pol in policies:
    r = run_experiment(cfg, pol)
    print(f"{pol.label:<24}{r.t_comp_parallel:10.2f}{r.t_trans:10.3f}{r.t_cloud:12.2f}{r.e2e:12.2f}{r.candidates:9d}")

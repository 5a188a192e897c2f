"""How latency moves with instances per object (m) and dimensionality (d).

Runs the fixed-threshold baseline across m and d at desk scale and writes
``metrics_sweep_m.csv`` and ``metrics_sweep_d.csv`` to ``$SAPSKY_OUT``.
"""
from sapsky.config import desk_config
from sapsky.harness import output_dir, run_sweep
from sapsky.policies import Policy

cfg = desk_config(c_max=1.0, l_max=1.0)
fixed = Policy("fixed_threshold", fixed_alpha=0.02)
out = output_dir()
for axis, values in (("m", cfg.sweep_m), ("d", cfg.sweep_d)):
    res = run_sweep(cfg, axis, values, [fixed], out=out)
    for v, per in res.items():
        r = per[fixed.label][0]
        print(f"{axis}={v}: computation {r.t_comp_parallel:8.2f} s  transmission {r.t_trans:6.3f} s  "
              f"e2e {r.e2e:8.2f} s")
print(f"CSV files in {out}")

"""Command-line entry points: ``train``, ``eval``, ``sweep`` and ``verify``.

Outputs go to the directory named by ``SAPSKY_OUT`` (default ``./sapsky_out``).
"""
from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .harness import BATTERIES, evaluate, output_dir, run_sweep, train_agent, verify
from .policies import KINDS, Policy


def _policy(args, cfg) -> Policy:
    if args.policy == "fixed_threshold":
        return Policy("fixed_threshold", fixed_alpha=cfg.fixed_alpha)
    if args.policy == "sa_psky":
        return Policy("sa_psky", actor=args.checkpoint)
    return Policy(args.policy)


def _cmd_train(args, cfg):
    out = output_dir()

    def show(e):
        print(f"episode {e.episode} return {e.ret:.6g} loss {e.critic_loss:.4g} "
              f"alpha {e.mean_alpha:.4f} sigma {e.sigma_ou:.4f}")

    train_agent(cfg, args.episodes, out, args.deterministic, callback=show)
    print(f"wrote {out / 'training_log.csv'} and {out / 'actor.json'}")
    return 0


def _cmd_eval(args, cfg):
    policy = _policy(args, cfg)
    grouped = evaluate(cfg, policy, output_dir(), args.deterministic)
    for label, reports in grouped.items():
        for r in reports:
            print(f"{label} seed={r.seed} e2e={r.e2e:.6g} comp={r.t_comp_parallel:.6g} "
                  f"trans={r.t_trans:.6g} cloud={r.t_cloud:.6g}")
    return 0


def _cmd_sweep(args, cfg):
    values = cfg.sweep_m if args.axis == "m" else cfg.sweep_d
    policies = [Policy("fixed_threshold", fixed_alpha=cfg.fixed_alpha)]
    if args.checkpoint:
        policies.append(Policy("sa_psky", actor=args.checkpoint))
    result = run_sweep(cfg, args.axis, values, policies, cfg.repeats, output_dir(), args.deterministic)
    for v, per in result.items():
        for label, reps in per.items():
            mean = sum(r.e2e for r in reps) / len(reps)
            print(f"{args.axis}={v} {label} e2e={mean:.6g}")
    return 0


def _cmd_verify(args, cfg):
    names = args.battery if args.battery is not None else None
    results = verify(cfg, names, stream=sys.stdout)
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sapsky", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="YAML file of flat config keys")
        p.add_argument("--deterministic", action="store_true", help="omit timestamp header lines")
        return p

    p = add("train", "train the threshold controller")
    p.add_argument("--episodes", type=int, default=None)
    p.set_defaults(func=_cmd_train)
    p = add("eval", "stream the workload under one policy")
    p.add_argument("--policy", choices=KINDS, required=True)
    p.add_argument("--checkpoint", default=None)
    p.set_defaults(func=_cmd_eval)
    p = add("sweep", "vary m or d")
    p.add_argument("--axis", choices=("m", "d"), required=True)
    p.add_argument("--checkpoint", default=None, help="also sweep a trained controller")
    p.set_defaults(func=_cmd_sweep)
    p = add("verify", "run the self-check batteries")
    p.add_argument("--battery", action="append", choices=sorted(BATTERIES),
                   help="repeatable; pass --no-batteries to run none")
    p.add_argument("--no-batteries", dest="battery", action="store_const", const=[])
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except (ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

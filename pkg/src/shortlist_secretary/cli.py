"""Command-line entry point: ``shortlist-secretary <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .baselines import check_submodular, exhaustive_opt, offline_greedy
from .harness import TrialConfig, compare_modes, generate_instance, load_instance, run_sweep
from .secretary import capture_experiment
from .shortlist import AlgoConfig
from .submodular import Hardness, objective_from_dict
from .windows import build_window_plan

MAX_P = 3


def _read_json(path):
    return json.loads(Path(path).read_text())


def _load_instance_args(args) -> dict:
    if args.instance:
        inst = _read_json(args.instance)
    else:
        if not (args.objective and args.constraint):
            raise SystemExit("give --instance, or both --objective and --constraint")
        obj, cons = _read_json(args.objective), _read_json(args.constraint)
        inst = {"objective": obj.get("objective", obj), "constraint": cons.get("constraint", cons)}
    matchoid = inst.get("constraint", {}).get("matchoid")
    if matchoid and int(matchoid["p"]) > MAX_P and not getattr(args, "allow_large_p", False):
        raise SystemExit(f"p={matchoid['p']} > {MAX_P}; pass --allow-large-p to run anyway")
    return inst


def _add_instance_args(p):
    p.add_argument("--instance", help="instance JSON (objective + constraint)")
    p.add_argument("--objective", help="objective JSON, used with --constraint")
    p.add_argument("--constraint", help="constraint JSON, used with --objective")
    p.add_argument("--allow-large-p", action="store_true")


def _add_algo_args(p):
    p.add_argument("--mode", choices=["full", "preemption", "streaming"], default="full")
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--alpha", type=int, default=1)
    p.add_argument("--beta", type=int, default=1)
    p.add_argument("--k", type=int, default=None, help="rank override (default: constraint rank)")
    p.add_argument("--buffer-budget", type=int, default=None)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)


def _algo(args) -> AlgoConfig:
    return AlgoConfig(args.epsilon, args.alpha, args.beta, args.mode, args.k, args.buffer_budget)


def cmd_gen(args):
    params = json.loads(args.params) if args.params else {}
    for key in ("n", "k"):
        if getattr(args, key) is not None:
            params[key] = getattr(args, key)
    if args.constraint_type:
        cons = {"type": args.constraint_type, "k": params.get("k", 1)}
        if args.num_vertices:
            cons["num_vertices"] = args.num_vertices
        params["constraint"] = cons
    inst = generate_instance(args.kind, params, np.random.default_rng(args.seed))
    text = json.dumps(inst, indent=1)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)


def cmd_run(args):
    inst = _load_instance_args(args)
    cfg = TrialConfig(inst, _algo(args), args.trials, args.seed, args.opt, args.opt_limit,
                      not args.no_wall_clock, args.out, args.format)
    if args.dump_plan:
        f, cons = load_instance(inst)
        k = cfg.algo.k if cfg.algo.k is not None else cons.rank
        rng = np.random.default_rng(args.seed)
        rng.permutation(f.ground_size)
        plan = build_window_plan(f.ground_size, k, cfg.algo.alpha, cfg.algo.beta, rng)
        Path(args.dump_plan).write_text(json.dumps(plan.to_dict(), indent=1))
    report = run_sweep(cfg)
    print(json.dumps({"summary": report["summary"], "violations": report["violations"]}, indent=2))
    return 0 if report["ok"] else 1


def cmd_compare(args):
    inst = _load_instance_args(args)
    cfg = TrialConfig(inst, _algo(args), args.trials, args.seed)
    verdict = compare_modes(cfg, args.against)
    if args.out:
        Path(args.out).write_text(json.dumps(verdict, indent=2))
    print(json.dumps({k: v for k, v in verdict.items() if k != "seeds"}, indent=2))
    return 0 if verdict["equal"] else 1


def cmd_opt(args):
    f, cons = load_instance(_load_instance_args(args))
    res = exhaustive_opt(f, cons, limit=args.limit, prune=args.prune and not isinstance(f, Hardness))
    print(json.dumps({"value": res.value, "set": sorted(res.best_set), "method": res.method}))


def cmd_greedy(args):
    f, cons = load_instance(_load_instance_args(args))
    res = offline_greedy(f, cons)
    print(json.dumps({"value": res.value, "set": sorted(res.best_set), "method": res.method}))


def cmd_check_fn(args):
    inst = _read_json(args.instance)
    f = objective_from_dict(inst.get("objective", inst))
    res = check_submodular(f)
    print(json.dumps({"ok": res.ok, "violation": res.kind, "witness": res.witness}))
    return 0 if res.ok else 1


def cmd_secretary_max(args):
    if args.values:
        text = Path(args.values).read_text().strip()
        values = json.loads(text) if text.startswith("[") else [float(x) for x in text.split()]
    else:
        values = np.random.default_rng(args.seed).permutation(args.N).tolist()
    summary = capture_experiment(values, args.delta, args.trials, args.seed)
    print(json.dumps(summary.to_dict(), indent=2))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shortlist-secretary", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("kind", choices=["coverage", "modular", "facility", "hardness"])
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--constraint-type", choices=["uniform", "partition", "graphic", "matching"])
    p.add_argument("--num-vertices", type=int)
    p.add_argument("--params", help="extra generator parameters as JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="seeded trial sweep")
    _add_instance_args(p)
    _add_algo_args(p)
    p.add_argument("--opt", choices=["auto", "exhaustive", "greedy"], default="auto")
    p.add_argument("--opt-limit", type=int, default=20)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--no-wall-clock", action="store_true", help="write wall_ms as 0 for byte-identical reruns")
    p.add_argument("--dump-plan", help="write the first trial's window plan as JSON")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="check full mode against streaming or preemption mode")
    _add_instance_args(p)
    _add_algo_args(p)
    p.add_argument("--against", choices=["streaming", "preemption"], default="streaming")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("opt", help="exhaustive optimum")
    _add_instance_args(p)
    p.add_argument("--limit", type=int, default=20)
    p.add_argument("--prune", action="store_true", help="submodular upper-bound pruning")
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("greedy", help="offline greedy")
    _add_instance_args(p)
    p.set_defaults(func=cmd_greedy)

    p = sub.add_parser("check-fn", help="exhaustive monotonicity/submodularity check (n <= 12)")
    p.add_argument("instance")
    p.set_defaults(func=cmd_check_fn)

    p = sub.add_parser("secretary-max", help="classic secretary with a shortlist")
    p.add_argument("--values", help="file with values (JSON list or whitespace separated)")
    p.add_argument("--N", type=int, default=200)
    p.add_argument("--delta", type=float, default=0.2)
    p.add_argument("--trials", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_secretary_max)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args) or 0


if __name__ == "__main__":
    sys.exit(main())

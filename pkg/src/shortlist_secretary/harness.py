"""Instance generation, seeded trial sweeps and mode comparisons."""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import networkx as nx
import numpy as np

from .baselines import exhaustive_opt, offline_greedy, ratio_report, reference_ratio
from .constraints import (
    Matchoid,
    PartitionMatroid,
    UniformMatroid,
    GraphicMatroid,
    constraint_from_dict,
    constraint_to_dict,
    matching_matchoid,
)
from .shortlist import AlgoConfig, run
from .submodular import Coverage, FacilityLocation, Hardness, MalformedInstance, Modular, objective_from_dict
from .windows import ArrivalOrder, build_window_plan


SCHEMA_VERSION = 1
COLUMNS = [
    "seed", "f_out", "f_opt", "f_greedy", "ratio", "ratio_greedy", "shortlist_size", "shortlist_bound",
    "eval_count", "amortized_evals", "f_best_of_shortlist", "feasible", "wall_ms",
]
STREAMING_COLUMNS = ["buffer_hw", "buffer_bound"]
THREADS_ENV = "SHORTLIST_THREADS"


# -- instances -----------------------------------------------------------------

def _constraint(spec: dict, n: int, rng: np.random.Generator):
    kind = spec.get("type", "uniform")
    if kind == "uniform":
        return UniformMatroid(n, spec["k"])
    if kind == "partition":
        k = spec["k"]
        if spec.get("random_blocks", False):
            labels = rng.integers(0, k, size=n)
        else:
            labels = np.arange(n) * k // n
        blocks = [np.flatnonzero(labels == b).tolist() for b in range(k)]
        return PartitionMatroid(blocks, spec.get("capacity", 1))
    if kind == "graphic":
        v = spec["num_vertices"]
        edges = [tuple(int(x) for x in rng.choice(v, size=2, replace=False)) for _ in range(n)]
        return GraphicMatroid(v, edges)
    if kind == "matching":
        v = spec["num_vertices"]
        edges = [tuple(sorted(int(x) for x in rng.choice(v, size=2, replace=False))) for _ in range(n)]
        q = matching_matchoid(v, edges)
        g = nx.Graph()
        g.add_edges_from(edges)
        size = len(nx.max_weight_matching(g, maxcardinality=True))
        return Matchoid(q.members, q.p, ground_size=n, rank=size)
    raise MalformedInstance(f"unknown constraint kind {kind!r}")


def generate_instance(kind: str, params: dict, rng: np.random.Generator) -> dict:
    """Build an objective/constraint pair as a JSON-ready dict.

    ``kind`` is the objective family; ``params['constraint']`` picks the
    constraint (defaults to a uniform matroid of rank ``params['k']``).
    The hardness family always uses a uniform matroid of rank ``k + 1``.
    """
    params = dict(params)
    n = int(params.get("n", 0))
    meta = {"kind": kind, "params": params}
    if kind == "hardness":
        k = int(params["k"])
        L = n // (2 * k)
        if L < 1 or n < L * k + 1:
            raise MalformedInstance(f"hardness needs n >= 2k (got n={n}, k={k})")
        level = int(rng.integers(0, L))
        f = Hardness(k, L, n=n, instance=level)
        meta.update(L=L, instance=level)
        return {"objective": f.to_dict(), "constraint": constraint_to_dict(UniformMatroid(n, k + 1)), "meta": meta}
    if n < 1:
        raise MalformedInstance("n must be positive")
    if kind == "modular":
        f = Modular(rng.uniform(0, 1, size=n).round(6))
    elif kind == "coverage":
        universe = int(params.get("universe", max(2 * n // 3, 1)))
        max_cover = min(int(params.get("max_cover", 6)), universe)
        covers = [
            sorted(int(u) for u in rng.choice(universe, size=int(rng.integers(1, max_cover + 1)), replace=False))
            for _ in range(n)
        ]
        weights = rng.uniform(0.5, 1.5, size=universe).round(6) if params.get("weighted", True) else None
        f = Coverage(universe, covers, weights)
    elif kind == "facility":
        clients = int(params.get("clients", 10))
        f = FacilityLocation(rng.uniform(0, 1, size=(clients, n)).round(6), clients)
    else:
        raise MalformedInstance(f"unknown objective kind {kind!r}")
    cons = _constraint(params.get("constraint", {"type": "uniform", "k": params.get("k", 1)}), n, rng)
    return {"objective": f.to_dict(), "constraint": constraint_to_dict(cons), "meta": meta}


def load_instance(d: dict):
    return objective_from_dict(d["objective"]), constraint_from_dict(d["constraint"])


# -- trials --------------------------------------------------------------------

@dataclass
class TrialConfig:
    instance: dict
    algo: AlgoConfig = field(default_factory=AlgoConfig)
    trials: int = 1
    seed: int = 0
    opt: str = "auto"  # auto | exhaustive | greedy
    opt_limit: int = 20
    wall_clock: bool = True
    out: str | None = None
    fmt: str = "csv"

    def validate(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.opt not in ("auto", "exhaustive", "greedy"):
            raise ValueError("opt must be auto, exhaustive or greedy")
        if not ("objective" in self.instance or "generate" in self.instance):
            raise ValueError("instance needs objective/constraint or a generate block")

    def instance_for(self, seed: int) -> dict:
        gen = self.instance.get("generate")
        if gen is None:
            return self.instance
        return generate_instance(gen["kind"], gen["params"], np.random.default_rng([seed, 1]))


def _opt_value(f, constraint, cfg: TrialConfig):
    if cfg.opt == "greedy" or (cfg.opt == "auto" and f.ground_size > cfg.opt_limit):
        return None
    return exhaustive_opt(f, constraint, limit=max(cfg.opt_limit, f.ground_size), prune=f.kind != "hardness").value


def run_trial(f, constraint, algo: AlgoConfig, seed: int, record_trace: bool = False):
    rng = np.random.default_rng(seed)
    k = algo.k if algo.k is not None else constraint.rank
    order = ArrivalOrder.random(f.ground_size, rng, seed)
    plan = build_window_plan(f.ground_size, k, algo.alpha, algo.beta, rng)
    return run(f, constraint, order, plan, algo, record_trace=record_trace), plan


def _trial_row(cfg: TrialConfig, seed: int) -> dict:
    inst = cfg.instance_for(seed)
    f, constraint = load_instance(inst)
    res, _ = run_trial(f, constraint, cfg.algo, seed)
    f_greedy = offline_greedy(f, constraint).value
    f_opt = _opt_value(f, constraint, cfg)

    def ratio(den):
        if den is None:
            return None
        return 1.0 if den == 0 and res.f_out == 0 else res.f_out / den

    row = {
        "seed": seed,
        "f_out": res.f_out,
        "f_opt": f_opt,
        "f_greedy": f_greedy,
        "ratio": ratio(f_opt),
        "ratio_greedy": ratio(f_greedy),
        "shortlist_size": res.shortlist_size,
        "shortlist_bound": res.bound,
        "eval_count": res.eval_count,
        "amortized_evals": res.amortized_evals,
        "f_best_of_shortlist": res.f_best_of_shortlist,
        "feasible": constraint.is_feasible(res.output) and constraint.is_feasible(res.solution),
        "wall_ms": round(res.wall_ms, 3) if cfg.wall_clock else 0.0,
        "buffer_hw": res.buffer_hw,
        "buffer_bound": res.buffer_bound,
        "s_w_total": res.s_w_total,
        "s_w_in_a": res.s_w_in_a,
    }
    return row


def _columns(algo: AlgoConfig):
    return COLUMNS + (STREAMING_COLUMNS if algo.mode == "streaming" else [])


def run_sweep(cfg: TrialConfig) -> dict:
    """Run seeds ``seed .. seed+trials-1`` and return rows, summary and a config echo.

    Writes CSV or JSON when ``cfg.out`` is set.  ``report['ok']`` is False
    when any row breaks feasibility or the shortlist cap.
    """
    cfg.validate()
    seeds = list(range(cfg.seed, cfg.seed + cfg.trials))
    workers = int(os.environ.get(THREADS_ENV, "1") or 1)
    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_trial_row, [cfg] * len(seeds), seeds))
    else:
        rows = [_trial_row(cfg, s) for s in seeds]
    cols = _columns(cfg.algo)
    s_w_total = sum(r["s_w_total"] for r in rows)
    s_w_in_a = sum(r["s_w_in_a"] for r in rows)
    rows = [{c: r[c] for c in cols} for r in rows]
    violations = [r["seed"] for r in rows if not r["feasible"] or r["shortlist_size"] > r["shortlist_bound"]]
    kind = ("preemption", 1) if cfg.algo.mode == "preemption" else _constraint_kind(cfg)
    summary = ratio_report(rows, reference_ratio(kind[0], kind[1], cfg.algo.epsilon))
    summary["mean_shortlist"] = float(np.mean([r["shortlist_size"] for r in rows]))
    summary["mean_amortized_evals"] = float(np.mean([r["amortized_evals"] for r in rows]))
    # share of window picks that were also shortlisted online
    summary["s_w_in_a_rate"] = s_w_in_a / s_w_total if s_w_total else None
    summary["s_w_total"] = s_w_total
    report = {
        "schema_version": SCHEMA_VERSION,
        "config": _echo(cfg),
        "columns": cols,
        "rows": rows,
        "summary": summary,
        "violations": violations,
        "ok": not violations,
    }
    if cfg.out:
        write_report(report, cfg.out, cfg.fmt)
    return report


def _constraint_kind(cfg: TrialConfig):
    inst = cfg.instance_for(cfg.seed)
    if "matchoid" in inst["constraint"]:
        return ("matchoid", int(inst["constraint"]["matchoid"]["p"]))
    return ("matroid", 1)


def _echo(cfg: TrialConfig) -> dict:
    d = asdict(cfg)
    if "objective" in cfg.instance:
        d["instance"] = {"objective_type": cfg.instance["objective"]["type"], "constraint": list(cfg.instance["constraint"])}
    return d


def write_report(report: dict, path, fmt: str = "csv") -> None:
    path = Path(path)
    if fmt == "json":
        path.write_text(json.dumps(report, indent=2, sort_keys=True))
        return
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=report["columns"])
        writer.writeheader()
        for r in report["rows"]:
            writer.writerow({c: "" if r[c] is None else r[c] for c in report["columns"]})


# -- mode comparison ---------------------------------------------------------------

def compare_modes(cfg: TrialConfig, other: str = "streaming") -> dict:
    """Run ``full`` against ``other`` on the same seeds and compare outputs.

    Against ``streaming`` the shortlist and output must match exactly.
    Against ``preemption`` (alpha = beta = 1) the output and final solution
    must match and the preemption shortlist must be a subset of the full one.
    """
    cfg.validate()
    base = cfg.algo
    if other == "preemption" and (base.alpha, base.beta) != (1, 1):
        raise ValueError("preemption comparison needs alpha = beta = 1")
    full = AlgoConfig(base.epsilon, base.alpha, base.beta, "full", base.k)
    alt = AlgoConfig(base.epsilon, base.alpha, base.beta, other, base.k, base.buffer_budget)
    per_seed, mismatches = [], []
    for seed in range(cfg.seed, cfg.seed + cfg.trials):
        f, constraint = load_instance(cfg.instance_for(seed))
        a, _ = run_trial(f, constraint, full, seed, record_trace=True)
        b, _ = run_trial(f, constraint, alt, seed, record_trace=True)
        if other == "streaming":
            same = a.shortlist == b.shortlist and a.output == b.output
        else:
            same = a.output == b.output and a.solution == b.solution and set(b.shortlist) <= set(a.shortlist)
        entry = {
            "seed": seed,
            "equal": same,
            "buffer_hw_full": a.buffer_hw,
            "buffer_hw_other": b.buffer_hw,
            "buffer_bound": b.buffer_bound,
            "shortlist_full": a.shortlist_size,
            "shortlist_other": b.shortlist_size,
            "amortized_evals": b.amortized_evals,
        }
        if not same:
            entry["divergence"] = _divergence(a, b)
            mismatches.append(seed)
        per_seed.append(entry)
    hw_full = [e["buffer_hw_full"] for e in per_seed]
    hw_other = [e["buffer_hw_other"] for e in per_seed]
    return {
        "mode": other,
        "seeds": per_seed,
        "mismatches": mismatches,
        "equal": not mismatches,
        "mean_buffer_full": float(np.mean(hw_full)),
        "mean_buffer_other": float(np.mean(hw_other)),
    }


def _divergence(a, b) -> dict:
    for ta, tb in zip(a.traces, b.traces):
        if (ta.tau_star, ta.s_after, ta.a_star) != (tb.tau_star, tb.s_after, tb.a_star):
            return {
                "window": ta.window,
                "full": {"tau_star": ta.tau_star, "S": sorted(ta.s_after), "A_star": sorted(ta.a_star)},
                "other": {"tau_star": tb.tau_star, "S": sorted(tb.s_after), "A_star": sorted(tb.a_star)},
            }
    return {
        "shortlist_full": list(a.shortlist),
        "shortlist_other": list(b.shortlist),
        "output_full": sorted(a.output),
        "output_other": sorted(b.output),
    }

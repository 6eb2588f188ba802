"""Offline references: greedy, exhaustive optimum, and checkers for objectives."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class OptResult:
    best_set: frozenset
    value: float
    method: str


def offline_greedy(f, constraint, candidates=None) -> OptResult:
    """Repeatedly add the feasible item of largest marginal gain (lowest id on ties) while it helps."""
    pool = sorted(set(range(f.ground_size)) if candidates is None else set(candidates))
    s: frozenset = frozenset()
    f_s = f(s)
    while True:
        best_e, best_v = None, None
        for e in pool:
            if e in s or not constraint.is_feasible(s | {e}):
                continue
            v = f(s | {e})
            if best_v is None or v > best_v:
                best_e, best_v = e, v
        if best_e is None or not best_v > f_s:
            return OptResult(s, f_s, "greedy")
        s, f_s = s | {best_e}, best_v


def exhaustive_opt(f, constraint, limit: int = 20, prune: bool = False) -> OptResult:
    """Exact maximum over all feasible sets by depth-first enumeration.

    Supersets of infeasible sets are never visited.  With ``prune=True`` a
    branch is cut when ``f(S)`` plus the largest remaining marginals cannot
    beat the incumbent; this bound is only valid for submodular ``f``.
    """
    n = f.ground_size
    if n > limit:
        raise ValueError(f"n={n} exceeds the exhaustive limit {limit}; use offline_greedy instead")
    rank = getattr(constraint, "rank", n)
    best_set, best_val = frozenset(), f(frozenset())

    def visit(s, f_s, start):
        nonlocal best_set, best_val
        if f_s > best_val:
            best_set, best_val = s, f_s
        ext = [e for e in range(start, n) if constraint.is_feasible(s | {e})]
        if not ext:
            return
        values = {e: f(s | {e}) for e in ext}
        if prune:
            gains = sorted((values[e] - f_s for e in ext), reverse=True)[: max(rank - len(s), 0)]
            if f_s + sum(g for g in gains if g > 0) <= best_val:
                return
        for e in ext:
            visit(s | {e}, values[e], e + 1)

    visit(frozenset(), best_val, 0)
    return OptResult(best_set, best_val, "exhaustive")


@dataclass
class SubmodularCheck:
    ok: bool
    kind: str | None = None
    witness: dict | None = None

    def __bool__(self):
        return self.ok


def check_submodular(f, n: int | None = None, tol: float = 1e-9) -> SubmodularCheck:
    """Exhaustively test monotonicity and diminishing returns on ``{0..n-1}``.

    Returns the first violation found (monotonicity first, then
    ``Delta(e|S) < Delta(e|S+x)``) with its witness sets.
    """
    n = f.ground_size if n is None else n
    if n > 12:
        raise ValueError("exhaustive check is limited to n <= 12")
    size = 1 << n
    members = [frozenset(i for i in range(n) if mask >> i & 1) for mask in range(size)]
    val = np.array([f(s) for s in members])
    for mask in range(size):
        for e in range(n):
            bit = 1 << e
            if mask & bit:
                continue
            d = val[mask | bit] - val[mask]
            if d < -tol:
                return SubmodularCheck(False, "monotone", {"S": sorted(members[mask]), "e": e, "gain": float(d)})
    for mask in range(size):
        for e in range(n):
            bit = 1 << e
            if mask & bit:
                continue
            d = val[mask | bit] - val[mask]
            for x in range(n):
                xb = 1 << x
                if mask & xb or x == e:
                    continue
                t = mask | xb
                dt = val[t | bit] - val[t]
                if dt > d + tol:
                    return SubmodularCheck(
                        False,
                        "submodular",
                        {"S": sorted(members[mask]), "T": sorted(members[t]), "e": e,
                         "gain_S": float(d), "gain_T": float(dt)},
                    )
    return SubmodularCheck(True)


def reference_ratio(constraint_kind: str = "matroid", p: int = 1, epsilon: float = 0.0) -> float:
    """Asymptotic competitive-ratio reference (the O(1/k) term dropped)."""
    if constraint_kind == "preemption":
        return 0.5 * (1 - math.exp(-1)) * (1 - math.exp(-2)) * (1 - epsilon)
    if constraint_kind == "matroid":
        p = 1
    return (1 - math.exp(-(p + 1)) - epsilon) / (p + 1)


def ratio_report(trials, reference: float | None = None) -> dict:
    """Summary of ``f_out/f_opt`` and ``f_out/f_greedy`` over per-trial dicts."""

    def stats(xs):
        xs = np.asarray([x for x in xs if x is not None and np.isfinite(x)], dtype=float)
        if xs.size == 0:
            return None
        sd = float(xs.std(ddof=1)) if xs.size > 1 else 0.0
        half = 1.96 * sd / math.sqrt(xs.size)
        mean = float(xs.mean())
        return {"mean": mean, "std": sd, "ci95": [mean - half, mean + half], "count": int(xs.size)}

    def ratio(num, den):
        if den is None:
            return None
        if den == 0:
            return 1.0 if num == 0 else None
        return num / den

    opt = [ratio(t["f_out"], t.get("f_opt")) for t in trials]
    greedy = [ratio(t["f_out"], t.get("f_greedy")) for t in trials]
    return {"ratio_opt": stats(opt), "ratio_greedy": stats(greedy), "reference": reference}

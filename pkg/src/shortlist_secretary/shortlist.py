"""Window/slot shortlist algorithm for matroid and p-matchoid constraints.

Arrival positions are cut into windows of ``alpha*beta`` slots.  Inside a
window every ordered slot subsequence ``tau`` of length below ``alpha`` owns a
tracker holding a working solution ``V(tau)``.  For each slot, each tracker
runs the online max subroutine on replacement gains against ``V(tau)`` (a
leading dummy carries the best gain over previously tracked items ``R``),
shortlisting records into ``A``.  At slot end the tracker forks: the child
``tau + (slot,)`` adopts the exact argmax item and its repair set.  When the
window closes, the best complete subsequence becomes the new solution ``S``.

Modes:

* ``full`` keeps every arrived item resident.
* ``streaming`` evicts, at each slot boundary, items that are neither in
  ``A``, ``S``, ``R`` nor referenced by a live tracker.  Any later access to
  an evicted item raises, so equal outputs in both modes show the eviction
  is safe.
* ``preemption`` forces ``alpha = beta = 1`` and shortlists only the final
  choice of each subroutine run, so ``|A| <= k``.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

from .constraints import NEG_INF, GainResult
from .secretary import ReplacementConfig, ReplacementState
from .submodular import CountingOracle
from .windows import ArrivalOrder, WindowPlan

MODES = ("full", "preemption", "streaming")


class InvariantViolation(RuntimeError):
    pass


class EvictedItemError(InvariantViolation):
    pass


@dataclass(frozen=True)
class AlgoConfig:
    epsilon: float = 0.2
    alpha: int = 1
    beta: int = 1
    mode: str = "full"
    k: int | None = None
    buffer_budget: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.mode == "preemption":
            object.__setattr__(self, "alpha", 1)
            object.__setattr__(self, "beta", 1)
        if self.alpha < 1 or self.beta < 1:
            raise ValueError("alpha and beta must be >= 1")

    @property
    def delta(self) -> float:
        return self.epsilon / 2


def shortlist_bound(k: int, alpha: int, beta: int, epsilon: float, mode: str = "full") -> int:
    """Cap on |A|: k in preemption mode, else ceil(4 k beta C(alpha*beta, alpha) ln(2/epsilon))."""
    if mode == "preemption":
        return k
    return math.ceil(4 * k * beta * math.comb(alpha * beta, alpha) * math.log(2 / epsilon))


def tracker_table_size(alpha: int, beta: int) -> int:
    return sum(math.comb(alpha * beta, i) for i in range(alpha + 1))


@dataclass
class Tracker:
    tau: tuple
    picks: tuple
    removals: tuple
    working: frozenset
    value: float

    def child(self, slot: int, pick, removal: tuple, f) -> Tracker:
        if pick is None:
            return Tracker(self.tau + (slot,), self.picks + (None,), self.removals + ((),), self.working, self.value)
        working = (self.working - set(removal)) | {pick}
        return Tracker(self.tau + (slot,), self.picks + (pick,), self.removals + (removal,), working, f(working))


@dataclass
class WindowTrace:
    window: int
    slots: list
    s_before: frozenset
    r_before: frozenset
    tau_star: tuple
    s_w: frozenset
    s_bar: frozenset
    s_hat: frozenset
    s_after: frozenset
    a_star: frozenset
    feasible: bool
    s_w_in_a: int


@dataclass
class RunResult:
    shortlist: tuple
    output: frozenset
    solution: frozenset
    f_out: float
    f_best_of_shortlist: float
    shortlist_size: int
    bound: int
    buffer_hw: int
    buffer_bound: int
    eval_count: int
    n: int
    wall_ms: float
    s_w_total: int = 0
    s_w_in_a: int = 0
    traces: list = field(default_factory=list)

    @property
    def amortized_evals(self) -> float:
        return self.eval_count / self.n if self.n else 0.0


class _Buffer:
    def __init__(self, enforce: bool):
        self.enforce = enforce
        self.resident: set = set()
        self.high_water = 0

    def admit(self, item):
        self.resident.add(item)
        self.high_water = max(self.high_water, len(self.resident))

    def touch(self, items):
        if self.enforce:
            for e in items:
                if e not in self.resident:
                    raise EvictedItemError(f"item {e} was evicted but is still needed")

    def keep_only(self, keep: set):
        self.resident &= keep


class ShortlistRun:
    """Mutable state of one run; drive it with ``process_slot`` and ``close_window``."""

    def __init__(self, f, constraint, config: AlgoConfig, plan: WindowPlan, record_trace: bool = False):
        self.f = f if isinstance(f, CountingOracle) else CountingOracle(f)
        self.constraint = constraint
        self.config = config
        self.plan = plan
        self.record_trace = record_trace
        self.S: frozenset = frozenset()
        self.f_S = self.f(self.S)
        self.R: frozenset = frozenset()
        self.A: list = []
        self._in_a: set = set()
        self.A_star: frozenset = frozenset()
        self.buffer = _Buffer(enforce=config.mode == "streaming")
        self.traces: list = []
        self.s_w_total = 0
        self.s_w_in_a = 0
        self._start_window()

    # -- gains ------------------------------------------------------------

    def _gain(self, tracker: Tracker, e: int) -> GainResult:
        key = (tracker.working, e)
        hit = self._gain_cache.get(key)
        if hit is None:
            self.buffer.touch((e,))
            hit = self.constraint.gain(self.f, e, tracker.working, tracker.value)
            self._gain_cache[key] = hit
        return hit

    def _start_window(self):
        self.trackers = {(): Tracker((), (), (), self.S, self.f_S)}
        self.window_slots: list = []
        self._gain_cache: dict = {}

    def _add_to_shortlist(self, item):
        if item not in self._in_a:
            self._in_a.add(item)
            self.A.append(item)

    # -- slot processing ---------------------------------------------------

    def process_slot(self, slot: int, items) -> None:
        """Feed one slot's items (in arrival order) to every live tracker, then fork trackers."""
        items = list(items)
        local_slot = slot % self.plan.slots_per_window
        live = [t for tau, t in sorted(self.trackers.items()) if len(tau) < self.config.alpha]
        runs = []
        for t in live:
            cands = sorted(self.R - t.working)
            r_gains = [(e, self._gain(t, e)) for e in cands]
            dummy = max((g.gain for _, g in r_gains), default=NEG_INF)
            state = ReplacementState(ReplacementConfig(len(items) + 1, self.config.delta))
            state.step(dummy, None)
            runs.append((t, r_gains, state, []))
        for e in items:
            self.buffer.admit(e)
            for t, _, state, slot_gains in runs:
                g = self._gain(t, e)
                slot_gains.append((e, g))
                picked = state.step(g.gain, e)
                if picked and self.config.mode != "preemption":
                    self._add_to_shortlist(e)
        for t, r_gains, state, slot_gains in runs:
            if self.config.mode == "preemption":
                _, best = state.finalize()
                if best is not None:
                    self._add_to_shortlist(best)
            pick, removal = _argmax(r_gains + slot_gains)
            child = t.child(local_slot, pick, removal, self.f)
            if not self.constraint.is_feasible(child.working):
                raise InvariantViolation(f"tracker {child.tau} working set became infeasible")
            self.trackers[child.tau] = child
        self.window_slots.append(items)
        if self.config.mode == "preemption" and len(self.A) > self.plan.k:
            raise InvariantViolation("preemption shortlist exceeded k")
        if self.config.mode == "streaming":
            self.streaming_evict()

    def streaming_evict(self) -> None:
        keep = set(self._in_a) | set(self.S) | set(self.R)
        for t in self.trackers.values():
            keep |= t.working
            keep.update(p for p in t.picks if p is not None)
        self.buffer.keep_only(keep)
        budget = self.config.buffer_budget
        if budget is not None and self.buffer.high_water > budget:
            raise InvariantViolation(f"buffer high-water {self.buffer.high_water} exceeds budget {budget}")

    # -- window boundary ----------------------------------------------------

    def close_window(self, window: int) -> None:
        alpha = self.config.alpha
        complete = [t for tau, t in sorted(self.trackers.items()) if len(tau) == alpha]
        r_w = {p for t in complete for p in t.picks if p is not None}
        best = None
        for t in complete:
            if best is None or t.value > best.value:
                best = t
        s_w = frozenset(p for p in best.picks if p is not None)
        s_bar = frozenset(itertools.chain.from_iterable(best.removals))
        s_hat = frozenset(
            x for p, c in zip(best.picks, best.removals) if p is not None and p in self._in_a for x in c
        )
        s_before, r_before = self.S, self.R
        self.S, self.f_S = best.working, best.value
        # restricted to S: a removal whose replacement missed the shortlist must still leave A*
        self.A_star = ((self.A_star | (s_w & self._in_a)) - s_hat) & self.S
        self.R = self.R | r_w
        feasible = self.constraint.is_feasible(self.S)
        in_a = len(s_w & self._in_a)
        self.s_w_total += len(s_w)
        self.s_w_in_a += in_a
        if self.record_trace:
            self.traces.append(
                WindowTrace(window, self.window_slots, s_before, r_before, best.tau, s_w, s_bar, s_hat,
                            self.S, self.A_star, feasible, in_a)
            )
        if not feasible:
            raise InvariantViolation(f"S infeasible after window {window}")
        self._start_window()


def _argmax(scored):
    """First candidate with the strictly largest gain; ``(None, ())`` if none is feasible."""
    best_e, best = None, None
    for e, g in scored:
        if g.feasible and (best is None or g.gain > best.gain):
            best_e, best = e, g
    if best is None:
        return None, ()
    return best_e, best.removal


def run(f, constraint, order: ArrivalOrder, plan: WindowPlan, config: AlgoConfig, record_trace: bool = False) -> RunResult:
    """Stream ``order`` through the window plan; return shortlist, output and metrics."""
    from .baselines import offline_greedy

    t0 = time.perf_counter()
    if len(order) != plan.n:
        raise ValueError("arrival order and window plan disagree on n")
    if plan.alpha != config.alpha or plan.beta != config.beta:
        raise ValueError("window plan was built with different alpha/beta")
    state = ShortlistRun(f, constraint, config, plan, record_trace)
    bounds = plan.slot_bounds()
    spw = plan.slots_per_window
    for w in range(plan.num_windows):
        for j in range(w * spw, (w + 1) * spw):
            start, stop = bounds[j]
            state.process_slot(j, order.items[start:stop])
        state.close_window(w)
    counting = state.f
    evals = counting.call_count
    f_out = counting.inner(state.A_star)
    greedy_a = offline_greedy(counting.inner, constraint, candidates=state.A)
    k = plan.k
    max_slot = max(plan.slot_sizes, default=0)
    return RunResult(
        shortlist=tuple(state.A),
        output=state.A_star,
        solution=state.S,
        f_out=f_out,
        f_best_of_shortlist=max(greedy_a.value, f_out),
        shortlist_size=len(state.A),
        bound=shortlist_bound(k, config.alpha, config.beta, config.epsilon, config.mode),
        buffer_hw=state.buffer.high_water,
        buffer_bound=len(state.A) + max_slot + config.alpha * tracker_table_size(config.alpha, config.beta),
        eval_count=evals,
        n=plan.n,
        wall_ms=(time.perf_counter() - t0) * 1000,
        s_w_total=state.s_w_total,
        s_w_in_a=state.s_w_in_a,
        traces=state.traces,
    )

"""Online max with a logarithmic shortlist (secretary problem with replacement).

Items arrive one by one with a real value.  A record (value strictly above
everything seen so far) is shortlisted once at least ``u`` items have been
seen, until the shortlist holds ``L`` items.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

NEG_INF = -math.inf


def _ceil(x: float) -> int:
    # 4*ln(2/delta) is often an integer up to float noise
    return math.ceil(x - 1e-9)


@dataclass(frozen=True)
class ReplacementConfig:
    N: int
    delta: float

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("N must be non-negative")
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")

    @property
    def u(self) -> int:
        return _ceil(self.N * self.delta / 2)

    @property
    def L(self) -> int:
        return max(1, _ceil(4 * math.log(2 / self.delta)))


@dataclass
class ReplacementState:
    config: ReplacementConfig
    running_max: float = NEG_INF
    position: int = 0
    shortlist: list = field(default_factory=list)
    records_from_u: int = 0

    def step(self, value: float, item=None) -> bool:
        """Feed the next arrival; return True if it was shortlisted."""
        if self.position >= self.config.N:
            raise RuntimeError(f"more than N={self.config.N} arrivals")
        self.position += 1
        if not value > self.running_max:
            return False
        self.running_max = value
        if self.position < self.config.u:
            return False
        self.records_from_u += 1
        if len(self.shortlist) < self.config.L:
            self.shortlist.append((self.position, item, value))
            return True
        return False

    def finalize(self):
        """Return the shortlist and the shortlisted item of largest value (``None`` if empty)."""
        if self.position != self.config.N:
            raise RuntimeError(f"finalize after {self.position} of {self.config.N} arrivals")
        if not self.shortlist:
            return [], None
        best = max(self.shortlist, key=lambda rec: rec[2])
        return list(self.shortlist), best[1]


def secretary_max(values, delta: float) -> ReplacementState:
    """Run the online max over ``values`` in the given order; item ids are positions 0..N-1."""
    state = ReplacementState(ReplacementConfig(len(values), delta))
    for i, v in enumerate(values):
        state.step(float(v), i)
    return state


@dataclass
class CaptureSummary:
    trials: int
    captures: int
    max_shortlist: int
    cap: int
    histogram: dict

    @property
    def capture_rate(self) -> float:
        return self.captures / self.trials if self.trials else float("nan")

    def to_dict(self):
        return {
            "trials": self.trials,
            "capture_rate": self.capture_rate,
            "max_shortlist": self.max_shortlist,
            "cap": self.cap,
            "shortlist_histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


def capture_experiment(values, delta: float, trials: int, seed: int = 0) -> CaptureSummary:
    """Shuffle ``values`` ``trials`` times and count how often the true maximum is returned."""
    values = np.asarray(values, dtype=float)
    top = int(np.argmax(values))
    rng = np.random.default_rng(seed)
    hist: Counter = Counter()
    captures = 0
    for _ in range(trials):
        perm = rng.permutation(len(values))
        state = secretary_max(values[perm], delta)
        _, best = state.finalize()
        captures += best is not None and int(perm[best]) == top
        hist[len(state.shortlist)] += 1
    cap = ReplacementConfig(len(values), delta).L
    return CaptureSummary(trials, captures, max(hist, default=0), cap, dict(hist))

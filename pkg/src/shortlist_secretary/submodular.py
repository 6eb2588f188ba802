"""Value-oracle objectives over a ground set ``{0, ..., n-1}``.

Every objective is a callable ``f(S) -> float`` taking any iterable of item
ids.  Objectives are immutable once built; ``CountingOracle`` wraps one and
counts evaluations.
"""

from __future__ import annotations

import threading
from collections.abc import Iterable, Sequence

import numpy as np


class MalformedInstance(ValueError):
    """Raised when an item id or instance parameter is out of range."""


class SubmodularFunction:
    """Base class for monotone submodular value oracles."""

    ground_size: int = 0
    kind: str = "abstract"

    def __call__(self, items: Iterable[int]) -> float:
        s = frozenset(items)
        self._check_ids(s)
        return self.evaluate(s)

    def evaluate(self, s: frozenset) -> float:
        raise NotImplementedError

    def _check_ids(self, s: frozenset) -> None:
        for e in s:
            if not (isinstance(e, (int, np.integer)) and 0 <= e < self.ground_size):
                raise MalformedInstance(f"item {e!r} not in ground set of size {self.ground_size}")

    def to_dict(self) -> dict:
        raise NotImplementedError


class CountingOracle(SubmodularFunction):
    """Transparent wrapper that counts calls to the inner oracle."""

    def __init__(self, inner: SubmodularFunction):
        self.inner = inner
        self.ground_size = inner.ground_size
        self.kind = inner.kind
        self.call_count = 0
        self._lock = threading.Lock()

    def __call__(self, items: Iterable[int]) -> float:
        with self._lock:
            self.call_count += 1
        return self.inner(items)

    def evaluate(self, s: frozenset) -> float:
        return self.inner.evaluate(s)

    def reset(self) -> None:
        with self._lock:
            self.call_count = 0

    def to_dict(self) -> dict:
        return self.inner.to_dict()


def marginal(f: SubmodularFunction, e: int, s: Iterable[int]) -> float:
    """Return ``f(S + e) - f(S)``; zero when ``e`` is already in ``S``."""
    s = frozenset(s)
    if not (isinstance(e, (int, np.integer)) and 0 <= e < f.ground_size):
        raise MalformedInstance(f"item {e!r} not in ground set of size {f.ground_size}")
    if e in s:
        return 0.0
    return f(s | {e}) - f(s)


def _nonneg(values, what: str) -> tuple:
    out = tuple(float(v) for v in values)
    for v in out:
        if not np.isfinite(v) or v < 0:
            raise MalformedInstance(f"{what} must be finite and non-negative, got {v}")
    return out


class Modular(SubmodularFunction):
    kind = "modular"

    def __init__(self, weights: Sequence[float]):
        self.weights = _nonneg(weights, "weights")
        self.ground_size = len(self.weights)

    def evaluate(self, s):
        # sorted so the float sum does not depend on set iteration order
        return float(sum(self.weights[e] for e in sorted(s)))

    def to_dict(self):
        return {"type": "modular", "weights": list(self.weights)}


class Coverage(SubmodularFunction):
    """Weighted coverage: f(S) is the total weight of universe points covered by S."""

    kind = "coverage"

    def __init__(self, universe_size: int, covers: Sequence[Iterable[int]], weights: Sequence[float] | None = None):
        if universe_size < 0:
            raise MalformedInstance("universe_size must be non-negative")
        self.universe_size = int(universe_size)
        if weights is None:
            weights = [1.0] * self.universe_size
        self.weights = _nonneg(weights, "weights")
        if len(self.weights) != self.universe_size:
            raise MalformedInstance("need one weight per universe point")
        self.covers = tuple(frozenset(int(u) for u in c) for c in covers)
        for c in self.covers:
            if any(u < 0 or u >= self.universe_size for u in c):
                raise MalformedInstance("cover references a point outside the universe")
        self.ground_size = len(self.covers)

    def evaluate(self, s):
        covered = set()
        for e in s:
            covered |= self.covers[e]
        return float(sum(self.weights[u] for u in sorted(covered)))

    def to_dict(self):
        return {
            "type": "coverage",
            "universe_size": self.universe_size,
            "covers": [sorted(c) for c in self.covers],
            "weights": list(self.weights),
        }


class FacilityLocation(SubmodularFunction):
    """f(S) = sum over clients of the best similarity to an opened item."""

    kind = "facility"

    def __init__(self, similarity, clients: int | None = None):
        sim = np.asarray(similarity, dtype=float)
        if sim.ndim != 2:
            raise MalformedInstance("similarity must be a clients x items matrix")
        if clients is not None and sim.shape[0] != clients:
            raise MalformedInstance(f"similarity has {sim.shape[0]} rows, expected {clients} clients")
        if np.any(sim < 0) or not np.all(np.isfinite(sim)):
            raise MalformedInstance("similarity entries must be finite and non-negative")
        self.similarity = sim
        self.ground_size = sim.shape[1]

    def evaluate(self, s):
        if not s:
            return 0.0
        cols = sorted(s)
        return float(self.similarity[:, cols].max(axis=1).sum())

    def to_dict(self):
        return {"type": "facility", "clients": int(self.similarity.shape[0]), "similarity": self.similarity.tolist()}


def hardness_g(k: int, t: int) -> float:
    """k + k/2 + ... + (t - i*k)/2**i with i = t // k."""
    i = t // k
    return sum(k / 2**j for j in range(i)) + (t - i * k) / 2**i


class Hardness(SubmodularFunction):
    """Piecewise objective from the shortlist lower-bound construction.

    Layout of ids: blocks ``B^l = [l*k, (l+1)*k)`` for ``l < L``, then the
    type-A items, then filler B' items.  Without ``instance`` all ``L`` type-A
    items ``a^l`` are present; with ``instance=l`` only ``a^l`` is, which is
    the input family the construction feeds to an online algorithm.
    """

    kind = "hardness"

    def __init__(self, k: int, L: int, n: int | None = None, instance: int | None = None):
        if k < 1 or L < 1:
            raise MalformedInstance("hardness needs k >= 1 and L >= 1")
        self.k, self.L, self.instance = int(k), int(L), instance
        if instance is None:
            a_levels = list(range(L))
        else:
            if not 0 <= instance < L:
                raise MalformedInstance(f"instance must be in [0, {L})")
            a_levels = [int(instance)]
        core = L * k + len(a_levels)
        n = core if n is None else int(n)
        if n < core:
            raise MalformedInstance(f"n={n} too small for k={k}, L={L} (needs {core})")
        self.ground_size = n
        self.a_level = {L * k + i: lvl for i, lvl in enumerate(a_levels)}
        self.filler = tuple(range(core, n))

    def block(self, level: int) -> range:
        return range(level * self.k, (level + 1) * self.k)

    def evaluate(self, s):
        if not s:
            return 0.0
        k = self.k
        a_in = [e for e in s if e in self.a_level]
        size = len(s)
        if len(a_in) >= 2:
            return float(2 * k + 1)
        if not a_in:
            return 1.0 + hardness_g(k, size - 1)
        base = k + 0.5 * hardness_g(k, size - 1)
        level = self.a_level[a_in[0]]
        k_prime = sum(1 for e in s if level * k <= e < (level + 1) * k)
        i = (size - 1) // k
        return float(min(2 * k + 1, base + k_prime / 2 ** (i + 1)))

    def to_dict(self):
        return {"type": "hardness", "k": self.k, "L": self.L, "n": self.ground_size, "instance": self.instance}


def make_modular(weights):
    return Modular(weights)


def make_coverage(universe_size, covers, weights=None):
    return Coverage(universe_size, covers, weights)


def make_facility_location(similarity, clients=None):
    return FacilityLocation(similarity, clients)


def make_hardness_function(k, L, n=None, instance=None):
    return Hardness(k, L, n=n, instance=instance)


def objective_from_dict(d: dict) -> SubmodularFunction:
    kind = d.get("type")
    if kind == "modular":
        return Modular(d["weights"])
    if kind == "coverage":
        return Coverage(d["universe_size"], d["covers"], d.get("weights"))
    if kind == "facility":
        return FacilityLocation(d["similarity"], d.get("clients"))
    if kind == "hardness":
        return Hardness(d["k"], d["L"], n=d.get("n"), instance=d.get("instance"))
    raise MalformedInstance(f"unknown objective type {kind!r}")

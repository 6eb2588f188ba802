"""Random arrival orders and the slot/window partition of arrival positions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np


@dataclass(frozen=True)
class ArrivalOrder:
    items: tuple
    seed: int | None = None

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, seed: int | None = None) -> ArrivalOrder:
        return cls(tuple(int(x) for x in rng.permutation(n)), seed)

    def __len__(self):
        return len(self.items)


def balls_in_bins(n: int, m: int, rng: np.random.Generator) -> tuple:
    """Throw ``n`` balls into ``m`` bins independently and uniformly; return the counts."""
    if m < 1:
        raise ValueError("need at least one bin")
    if n < 0:
        raise ValueError("number of balls must be non-negative")
    bins = rng.integers(0, m, size=n)
    return tuple(int(c) for c in np.bincount(bins, minlength=m))


@dataclass(frozen=True)
class WindowPlan:
    n: int
    k: int
    alpha: int
    beta: int
    slot_sizes: tuple

    @property
    def num_windows(self) -> int:
        return math.ceil(self.k / self.alpha)

    @property
    def slots_per_window(self) -> int:
        return self.alpha * self.beta

    @property
    def num_slots(self) -> int:
        return len(self.slot_sizes)

    def window_of_slot(self, slot: int) -> int:
        return slot // self.slots_per_window

    def slot_bounds(self) -> list[tuple[int, int]]:
        """Half-open position ranges ``[start, stop)`` of every slot."""
        out, start = [], 0
        for size in self.slot_sizes:
            out.append((start, start + size))
            start += size
        return out

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "alpha": self.alpha,
            "beta": self.beta,
            "num_windows": self.num_windows,
            "slot_sizes": list(self.slot_sizes),
            "window_of_slot": [self.window_of_slot(j) for j in range(self.num_slots)],
        }


def build_window_plan(n: int, k: int, alpha: int, beta: int, rng: np.random.Generator) -> WindowPlan:
    """ceil(k/alpha) windows of alpha*beta slots; slot sizes are a ball-bin draw over all slots."""
    if alpha < 1 or beta < 1:
        raise ValueError("alpha and beta must be >= 1")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    m = math.ceil(k / alpha) * alpha * beta
    return WindowPlan(n, k, alpha, beta, balls_in_bins(n, m, rng))


class Arrival(NamedTuple):
    window: int
    slot: int
    position: int  # 0-based position inside the slot; -1 marks the end of a slot
    item: int | None


def stream(order: ArrivalOrder, plan: WindowPlan) -> Iterator[Arrival]:
    """Items in arrival order tagged with window and slot.

    After the items of each slot (possibly none) a boundary event with
    ``position == -1`` and ``item is None`` is emitted, so there are exactly
    ``plan.num_slots`` boundaries.
    """
    if len(order) != plan.n:
        raise ValueError(f"order has {len(order)} items but the plan expects {plan.n}")
    for slot, (start, stop) in enumerate(plan.slot_bounds()):
        w = plan.window_of_slot(slot)
        for pos in range(start, stop):
            yield Arrival(w, slot, pos - start, order.items[pos])
        yield Arrival(w, slot, -1, None)

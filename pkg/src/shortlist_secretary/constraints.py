"""Matroid and p-matchoid independence oracles and replacement gains.

The replacement gain of an item ``e`` against a feasible set ``S`` is the
best value of ``f(S + e - D) - f(S)`` over repair sets ``D`` that keep the
result feasible.  For a matroid ``D`` is empty or a single element; for a
p-matchoid ``D`` holds at most one element per member matroid containing
``e``.  Ties between repair sets go to the shorter one, then to the smaller
sorted id tuple, so the winner is always an inclusion-minimal repair.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .submodular import MalformedInstance, SubmodularFunction

NEG_INF = -math.inf


class ConstraintError(ValueError):
    """A set handed to a gain computation violates its precondition."""


@dataclass(frozen=True)
class GainResult:
    gain: float
    removal: tuple = ()
    feasible: bool = True

    @classmethod
    def infeasible(cls) -> GainResult:
        return cls(NEG_INF, (), False)


class DisjointSets:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self.parent[max(rx, ry)] = min(rx, ry)
        return True


class Matroid:
    """Independence oracle over ground set ``{0, ..., ground_size - 1}``."""

    kind = "abstract"
    ground_size: int
    rank: int
    p = 1

    def is_independent(self, items: Iterable[int]) -> bool:
        raise NotImplementedError

    def is_feasible(self, items: Iterable[int]) -> bool:
        return self.is_independent(items)

    def gain(self, f, e, s, f_s=None) -> GainResult:
        return theta_matroid(f, self, e, s, f_s)

    def _check(self, s: frozenset) -> None:
        for e in s:
            if not 0 <= e < self.ground_size:
                raise MalformedInstance(f"item {e!r} not in matroid ground set of size {self.ground_size}")

    def to_dict(self) -> dict:
        raise NotImplementedError


class UniformMatroid(Matroid):
    kind = "uniform"

    def __init__(self, n: int, k: int):
        if n < 0 or k < 0:
            raise MalformedInstance("uniform matroid needs n >= 0 and k >= 0")
        self.ground_size, self.capacity = int(n), int(k)
        self.rank = min(self.capacity, self.ground_size)

    def is_independent(self, items):
        s = frozenset(items)
        self._check(s)
        return len(s) <= self.capacity

    def to_dict(self):
        return {"type": "uniform", "n": self.ground_size, "k": self.capacity}


class PartitionMatroid(Matroid):
    """Blocks must cover the ground set exactly; block ``b`` holds at most ``capacities[b]`` items."""

    kind = "partition"

    def __init__(self, blocks: Sequence[Sequence[int]], capacities: Sequence[int] | int = 1):
        self.blocks = tuple(tuple(sorted(int(e) for e in b)) for b in blocks)
        if isinstance(capacities, int):
            capacities = [capacities] * len(self.blocks)
        self.capacities = tuple(int(c) for c in capacities)
        if len(self.capacities) != len(self.blocks):
            raise MalformedInstance("need one capacity per block")
        if any(c < 0 for c in self.capacities):
            raise MalformedInstance("capacities must be non-negative")
        members = [e for b in self.blocks for e in b]
        self.ground_size = len(members)
        if sorted(members) != list(range(self.ground_size)):
            raise MalformedInstance("partition blocks must cover 0..n-1 exactly once")
        self.block_of = [0] * self.ground_size
        for b, block in enumerate(self.blocks):
            for e in block:
                self.block_of[e] = b
        self.rank = sum(min(c, len(b)) for c, b in zip(self.capacities, self.blocks))

    def is_independent(self, items):
        s = frozenset(items)
        self._check(s)
        counts = [0] * len(self.blocks)
        for e in s:
            b = self.block_of[e]
            counts[b] += 1
            if counts[b] > self.capacities[b]:
                return False
        return True

    def to_dict(self):
        return {"type": "partition", "blocks": [list(b) for b in self.blocks], "capacities": list(self.capacities)}


class GraphicMatroid(Matroid):
    """Item ``i`` is edge ``edges[i]`` of an undirected multigraph; independent sets are forests."""

    kind = "graphic"

    def __init__(self, num_vertices: int, edges: Sequence[tuple[int, int]]):
        self.num_vertices = int(num_vertices)
        self.edges = tuple((int(u), int(v)) for u, v in edges)
        for u, v in self.edges:
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise MalformedInstance(f"edge ({u}, {v}) has an endpoint outside the vertex set")
        self.ground_size = len(self.edges)
        dsu = DisjointSets(self.num_vertices)
        self.rank = sum(dsu.union(u, v) for u, v in self.edges)

    def is_independent(self, items):
        s = frozenset(items)
        self._check(s)
        dsu = DisjointSets(self.num_vertices)
        for e in s:
            u, v = self.edges[e]
            if not dsu.union(u, v):
                return False
        return True

    def to_dict(self):
        return {"type": "graphic", "num_vertices": self.num_vertices, "edges": [list(e) for e in self.edges]}


def matroid_from_dict(d: dict) -> Matroid:
    kind = d.get("type")
    if kind == "uniform":
        return UniformMatroid(d["n"], d["k"])
    if kind == "partition":
        return PartitionMatroid(d["blocks"], d.get("capacities", 1))
    if kind == "graphic":
        return GraphicMatroid(d["num_vertices"], d["edges"])
    raise MalformedInstance(f"unknown matroid type {kind!r}")


class MatchoidMember:
    """One matroid of a matchoid, living on the global ids listed in ``ground``.

    The wrapped matroid is indexed locally: global id ``ground[i]`` is its item ``i``.
    """

    def __init__(self, ground: Sequence[int], matroid: Matroid):
        self.ground = tuple(int(e) for e in ground)
        if len(set(self.ground)) != len(self.ground):
            raise MalformedInstance("member ground set has duplicate ids")
        if matroid.ground_size != len(self.ground):
            raise MalformedInstance("member matroid size does not match its ground set")
        self.matroid = matroid
        self.local = {e: i for i, e in enumerate(self.ground)}

    def restrict(self, s: Iterable[int]) -> frozenset:
        return frozenset(e for e in s if e in self.local)

    def is_independent(self, s: Iterable[int]) -> bool:
        return self.matroid.is_independent(self.local[e] for e in s if e in self.local)


class Matchoid:
    """Feasible sets are those independent in every member after restriction."""

    kind = "matchoid"

    def __init__(self, members: Sequence[MatchoidMember], p: int, ground_size: int | None = None, rank: int | None = None):
        self.members = tuple(members)
        self.p = int(p)
        top = max((max(m.ground, default=-1) for m in self.members), default=-1) + 1
        self.ground_size = top if ground_size is None else int(ground_size)
        if self.ground_size < top:
            raise MalformedInstance("member ground set exceeds the declared ground size")
        self.membership: list[tuple[int, ...]] = [() for _ in range(self.ground_size)]
        for idx, m in enumerate(self.members):
            for e in m.ground:
                self.membership[e] += (idx,)
        worst = max((len(x) for x in self.membership), default=0)
        if worst > self.p:
            raise MalformedInstance(f"an item lies in {worst} member ground sets, more than p={self.p}")
        self.rank = self._largest_feasible() if rank is None else int(rank)

    def _largest_feasible(self) -> int:
        # exact for small ground sets; maximal greedy set otherwise
        if self.ground_size <= 16:
            best = 0

            def grow(s, start):
                nonlocal best
                best = max(best, len(s))
                for e in range(start, self.ground_size):
                    t = s | {e}
                    if self.is_feasible(t):
                        grow(t, e + 1)

            grow(frozenset(), 0)
            return best
        s = frozenset()
        for e in range(self.ground_size):
            if self.is_feasible(s | {e}):
                s = s | {e}
        return len(s)

    def is_feasible(self, items: Iterable[int]) -> bool:
        s = frozenset(items)
        for e in s:
            if not 0 <= e < self.ground_size:
                raise MalformedInstance(f"item {e!r} not in matchoid ground set")
        return all(m.is_independent(s) for m in self.members)

    def gain(self, f, e, s, f_s=None) -> GainResult:
        return gain_matchoid(f, self, e, s, f_s)

    def to_dict(self):
        return {
            "p": self.p,
            "n": self.ground_size,
            "rank": self.rank,
            "members": [{"ground": list(m.ground), "matroid": m.matroid.to_dict()} for m in self.members],
        }


def matchoid_from_dict(d: dict) -> Matchoid:
    members = [MatchoidMember(m["ground"], matroid_from_dict(m["matroid"])) for m in d["members"]]
    return Matchoid(members, d["p"], ground_size=d.get("n"), rank=d.get("rank"))


def constraint_from_dict(d: dict):
    if "matroid" in d:
        return matroid_from_dict(d["matroid"])
    if "matchoid" in d:
        return matchoid_from_dict(d["matchoid"])
    raise MalformedInstance("constraint needs a 'matroid' or 'matchoid' entry")


def constraint_to_dict(c) -> dict:
    if isinstance(c, Matchoid):
        return {"matchoid": c.to_dict()}
    return {"matroid": c.to_dict()}


def matching_matchoid(num_vertices: int, edges: Sequence[tuple[int, int]]) -> Matchoid:
    """2-matchoid of graph matchings: one capacity-1 member per vertex over its incident edges."""
    incident: dict[int, list[int]] = {v: [] for v in range(num_vertices)}
    for i, (u, v) in enumerate(edges):
        if u == v:
            raise MalformedInstance("self-loops cannot be matched")
        incident[u].append(i)
        incident[v].append(i)
    members = [
        MatchoidMember(inc, UniformMatroid(len(inc), 1)) for v, inc in sorted(incident.items()) if inc
    ]
    return Matchoid(members, p=2, ground_size=len(edges))


def _best_removal(f: SubmodularFunction, s: frozenset, e: int, removals, f_s: float) -> GainResult:
    best = None
    for r in sorted(removals, key=lambda r: (len(r), r)):
        value = f((s - set(r)) | {e}) - f_s
        if best is None or value > best.gain:
            best = GainResult(value, r, True)
    return best if best is not None else GainResult.infeasible()


def theta_matroid(f: SubmodularFunction, m: Matroid, e: int, s: Iterable[int], f_s: float | None = None) -> GainResult:
    """Best single-swap (or no-swap) insertion of ``e`` into independent ``S``."""
    s = frozenset(s)
    if e in s:
        raise ConstraintError(f"item {e} is already in S")
    if not m.is_independent(s):
        raise ConstraintError("S is not independent")
    candidates = []
    if m.is_independent(s | {e}):
        candidates.append(())
    for x in sorted(s):
        if m.is_independent((s - {x}) | {e}):
            candidates.append((x,))
    if f_s is None:
        f_s = f(s)
    result = _best_removal(f, s, e, candidates, f_s)
    assert not result.feasible or m.is_independent((s - set(result.removal)) | {e})
    return result


def omega(member: MatchoidMember, e: int, s: Iterable[int]) -> list[tuple]:
    """Repair options for ``e`` inside one member: ``()`` if no repair is needed, else single removals."""
    local = member.restrict(s)
    if e not in member.local:
        raise ConstraintError(f"item {e} is not in this member's ground set")
    if not member.is_independent(local):
        raise ConstraintError("S restricted to the member is not independent")
    out = []
    if member.is_independent(local | {e}):
        out.append(())
    for x in sorted(local):
        if member.is_independent((local - {x}) | {e}):
            out.append((x,))
    return out


def gain_matchoid(f: SubmodularFunction, q: Matchoid, e: int, s: Iterable[int], f_s: float | None = None) -> GainResult:
    """Best insertion of ``e`` removing at most one element per member that contains ``e``."""
    s = frozenset(s)
    if e in s:
        raise ConstraintError(f"item {e} is already in S")
    if not q.is_feasible(s):
        raise ConstraintError("S is not feasible in the matchoid")
    factors = [omega(q.members[idx], e, s) for idx in q.membership[e]]
    if any(not fac for fac in factors):
        return GainResult.infeasible()
    removals = {tuple(sorted(set(itertools.chain.from_iterable(combo)))) for combo in itertools.product(*factors)}
    if f_s is None:
        f_s = f(s)
    result = _best_removal(f, s, e, removals, f_s)
    assert q.is_feasible((s - set(result.removal)) | {e})
    return result


def extend_to_basis(m: Matroid, s: Iterable[int]) -> frozenset:
    s = frozenset(s)
    if not m.is_independent(s):
        raise ConstraintError("S is not independent")
    for e in range(m.ground_size):
        if e not in s and m.is_independent(s | {e}):
            s = s | {e}
    return s


def brualdi_bijection(m: Matroid, a: Iterable[int], b: Iterable[int]) -> dict[int, int] | None:
    """Bijection ``pi: A -> B`` fixing ``A & B`` with ``A - x + pi(x)`` independent for every ``x``.

    Built as a perfect matching in the exchange graph between ``A - B`` and
    ``B - A`` using augmenting paths that try lower ids first.  ``None`` means
    no perfect matching exists, which a correct matroid oracle never produces.
    """
    a, b = frozenset(a), frozenset(b)
    left, right = sorted(a - b), sorted(b - a)
    if len(left) != len(right):
        return None
    adj = {x: [y for y in right if m.is_independent((a - {x}) | {y})] for x in left}
    match_of: dict[int, int] = {}

    def augment(x, seen):
        for y in adj[x]:
            if y in seen:
                continue
            seen.add(y)
            if y not in match_of or augment(match_of[y], seen):
                match_of[y] = x
                return True
        return False

    for x in left:
        if not augment(x, set()):
            return None
    pi = {x: x for x in a & b}
    pi.update({x: y for y, x in match_of.items()})
    return pi


def check_matroid_axioms(m: Matroid) -> tuple | None:
    """Exhaustive axiom check for small ground sets; returns the first violation or ``None``."""
    n = m.ground_size
    if n > 12:
        raise ValueError("exhaustive axiom check is limited to n <= 12")
    indep = {frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r) if m.is_independent(c)}
    if frozenset() not in indep:
        return ("empty", ())
    for s in indep:
        for x in s:
            if s - {x} not in indep:
                return ("downward", tuple(sorted(s)), x)
    for s in indep:
        for t in indep:
            if len(t) > len(s) and not any(s | {y} in indep for y in t - s):
                return ("exchange", tuple(sorted(s)), tuple(sorted(t)))
    sizes = {len(s) for s in indep if all(s | {y} not in indep for y in range(n) if y not in s)}
    if sizes != {m.rank}:
        return ("rank", tuple(sorted(sizes)), m.rank)
    return None

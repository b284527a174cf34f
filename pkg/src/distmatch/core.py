"""Instances, matchings and the basic combinatorics of distance matchings.

An instance is a bipartite graph ``G = (S, T; E)`` where the nodes of ``S``
are ordered ``s_1, ..., s_n`` and the nodes of ``T`` are ``t_1, ..., t_k``.
A *d-distance matching* is an edge set in which every S-node has degree at
most one and any two edges sharing a T-node sit at S-positions at least ``d``
apart (cyclically, for the cycle variant).

Matchings are plain ``frozenset`` objects of edge ids.  Edge ids index into
``Instance.edges``, which is always kept sorted by ``(s, t)``; so ordering by
edge id is the same as ordering lexicographically by ``(s, t)``.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Union

Matching = frozenset  # frozenset[int] of edge ids


class InputError(ValueError):
    """Malformed input: bad indices, duplicates, wrong mode and the like."""


class SizeError(RuntimeError):
    """A resource guard tripped (instance too large for the requested method)."""


class Variant(str, enum.Enum):
    LINE = "line"
    CYCLE = "cycle"


class Mode(str, enum.Enum):
    PERFECT = "perfect"
    MAXIMUM = "max"


class Edge(NamedTuple):
    s: int
    t: int
    weight: Fraction


class Loop(NamedTuple):
    """One copy of a parallel loop sitting on S-node ``s``."""

    s: int
    copy: int


def as_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise InputError(f"floating point weight {value!r} rejected; use int or 'p/q'")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {value!r}") from exc


@dataclass(frozen=True)
class Instance:
    n: int
    k: int
    d: int
    edges: tuple[Edge, ...] = ()
    variant: Variant = Variant.LINE
    mode: Mode = Mode.MAXIMUM
    loops: tuple[tuple[int, int], ...] = ()
    comments: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.d < 1:
            raise InputError("d must be a positive integer")
        if self.n < 0 or self.k < 0:
            raise InputError("n and k must be non-negative")
        edges = []
        seen = set()
        for e in self.edges:
            s, t, w = e if len(e) == 3 else (*e, 1)
            if not (1 <= s <= self.n and 1 <= t <= self.k):
                raise InputError(f"edge s{s}t{t} out of range (n={self.n}, k={self.k})")
            if (s, t) in seen:
                raise InputError(f"duplicate edge s{s}t{t}")
            seen.add((s, t))
            edges.append(Edge(int(s), int(t), as_fraction(w)))
        edges.sort(key=lambda e: (e.s, e.t))
        loops = {}
        for s, count in self.loops:
            if not 1 <= s <= self.n:
                raise InputError(f"loop at s{s} out of range")
            if s in loops:
                raise InputError(f"duplicate loop line for s{s}")
            if count < 0:
                raise InputError("loop count must be non-negative")
            if count:
                loops[s] = count
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "loops", tuple(sorted(loops.items())))
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "mode", Mode(self.mode))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_id(self) -> dict[tuple[int, int], int]:
        return {(e.s, e.t): i for i, e in enumerate(self.edges)}

    @cached_property
    def at_s(self) -> tuple[tuple[int, ...], ...]:
        """Edge ids incident to each S-node; index 0 is unused."""
        out = [[] for _ in range(self.n + 1)]
        for i, e in enumerate(self.edges):
            out[e.s].append(i)
        return tuple(tuple(x) for x in out)

    @cached_property
    def at_t(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in range(self.k + 1)]
        for i, e in enumerate(self.edges):
            out[e.t].append(i)
        return tuple(tuple(x) for x in out)

    def degree(self, s: int) -> int:
        return len(self.at_s[s])

    def dist(self, i: int, j: int) -> int:
        gap = abs(i - j)
        if self.variant is Variant.CYCLE:
            return min(gap, self.n - gap)
        return gap

    def conflict(self, a: int, b: int) -> bool:
        """True iff edges ``a`` and ``b`` cannot both be in a distance matching."""
        ea, eb = self.edges[a], self.edges[b]
        if a == b:
            return False
        if ea.s == eb.s:
            return True
        return ea.t == eb.t and self.dist(ea.s, eb.s) < self.d

    def replace(self, **changes) -> Instance:
        return replace(self, **changes)

    def unweighted(self) -> Instance:
        return self.replace(edges=tuple(Edge(e.s, e.t, Fraction(1)) for e in self.edges))

    def find(self, s: int, t: int) -> int:
        try:
            return self.edge_id[(s, t)]
        except KeyError:
            raise InputError(f"no edge s{s}t{t}") from None

    def matching(self, pairs: Iterable[tuple[int, int]]) -> frozenset[int]:
        """Build a matching from ``(s, t)`` pairs."""
        return frozenset(self.find(s, t) for s, t in pairs)

    def pairs(self, M: Iterable[int]) -> list[tuple[int, int]]:
        return [(self.edges[i].s, self.edges[i].t) for i in sorted(M)]

    def label(self, e: int) -> str:
        return f"s{self.edges[e].s}t{self.edges[e].t}"


# --------------------------------------------------------------------------
# windows


@dataclass(frozen=True)
class Window:
    center: int
    left: tuple[int, ...]
    right: tuple[int, ...]


def right_window(inst: Instance, i: int, size: int | None = None) -> tuple[int, ...]:
    """``R_d(s_i)``: ``s_i`` and the following nodes, clipped in the line variant."""
    size = inst.d if size is None else size
    if inst.variant is Variant.CYCLE:
        return tuple((i - 1 + j) % inst.n + 1 for j in range(min(size, inst.n)))
    return tuple(range(i, min(i + size - 1, inst.n) + 1))


def left_window(inst: Instance, i: int, size: int | None = None) -> tuple[int, ...]:
    size = inst.d if size is None else size
    if inst.variant is Variant.CYCLE:
        return tuple((i - 1 - j) % inst.n + 1 for j in reversed(range(min(size, inst.n))))
    return tuple(range(max(i - size + 1, 1), i + 1))


def window(inst: Instance, i: int) -> Window:
    if not 1 <= i <= inst.n:
        raise InputError(f"s{i} out of range")
    return Window(i, left_window(inst, i), right_window(inst, i))


def neighborhood(inst: Instance, i: int) -> tuple[int, ...]:
    """S-positions at distance < d from ``s_i`` (``L_d ∪ R_d``), sorted."""
    return tuple(sorted(set(left_window(inst, i)) | set(right_window(inst, i))))


# --------------------------------------------------------------------------
# feasibility


@dataclass(frozen=True)
class Feasibility:
    ok: bool
    reason: str = ""
    violation: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.ok

    def describe(self, inst: Instance) -> str:
        if self.ok:
            return "feasible"
        if self.reason == "uncovered":
            return f"uncovered s{self.violation[0]}"
        a, b = self.violation
        return f"{self.reason} conflict ({inst.label(a)}, {inst.label(b)})"


def _check_ids(inst: Instance, ids: Iterable[int]) -> list[int]:
    out = sorted(ids)
    for e in out:
        if not (isinstance(e, int) and 0 <= e < inst.m):
            raise InputError(f"invalid edge id {e!r}")
    return out


def is_feasible(inst: Instance, M: Iterable[int], perfect: bool | None = None) -> Feasibility:
    """Check the degree and distance conditions; report the first violation.

    Edges are scanned in ``(s, t)`` order and each is compared with the
    edges before it, so the reported pair is the first conflict in that order.
    ``perfect`` defaults to the instance mode.
    """
    ids = _check_ids(inst, M)
    perfect = inst.mode is Mode.PERFECT if perfect is None else perfect
    by_s: dict[int, int] = {}
    by_t: dict[int, list[int]] = defaultdict(list)
    for e in ids:
        s, t, _ = inst.edges[e]
        if s in by_s:
            return Feasibility(False, "degree", (by_s[s], e))
        for f in by_t[t]:
            if inst.dist(inst.edges[f].s, s) < inst.d:
                return Feasibility(False, "distance", (f, e))
        by_s[s] = e
        by_t[t].append(e)
    if perfect:
        for s in range(1, inst.n + 1):
            if s not in by_s:
                return Feasibility(False, "uncovered", (s,))
    return Feasibility(True)


def weight(inst: Instance, M: Iterable[int]) -> Fraction:
    return sum((inst.edges[e].weight for e in M), Fraction(0))


class Builder:
    """Incrementally grown distance matching with O(deg) conflict queries."""

    def __init__(self, inst: Instance, M: Iterable[int] = ()):
        self.inst = inst
        self.by_s: dict[int, int] = {}
        self.by_t: dict[int, set[int]] = defaultdict(set)
        for e in M:
            self.add(e)

    def conflicts(self, e: int) -> set[int]:
        inst = self.inst
        s, t, _ = inst.edges[e]
        out = set()
        if s in self.by_s and self.by_s[s] != e:
            out.add(self.by_s[s])
        for f in self.by_t[t]:
            if f != e and inst.dist(inst.edges[f].s, s) < inst.d:
                out.add(f)
        return out

    def can_add(self, e: int) -> bool:
        inst = self.inst
        s, t, _ = inst.edges[e]
        if s in self.by_s:
            return False
        return all(inst.dist(inst.edges[f].s, s) >= inst.d for f in self.by_t[t])

    def add(self, e: int) -> None:
        s, t, _ = self.inst.edges[e]
        self.by_s[s] = e
        self.by_t[t].add(e)

    def remove(self, e: int) -> None:
        s, t, _ = self.inst.edges[e]
        del self.by_s[s]
        self.by_t[t].discard(e)

    @property
    def matching(self) -> frozenset[int]:
        return frozenset(self.by_s.values())


# --------------------------------------------------------------------------
# hit sets


def hit_set(inst: Instance, M: Iterable[int], e: int) -> frozenset[int]:
    """Minimal subset of ``M`` whose removal lets ``e`` join ``M``."""
    M = frozenset(M)
    if e in M:
        raise InputError(f"{inst.label(e)} is already in the matching")
    _check_ids(inst, [e, *M])
    return frozenset(f for f in M if inst.conflict(e, f))


def hit_set_union(inst: Instance, M: Iterable[int], X: Iterable[int]) -> frozenset[int]:
    M = frozenset(M)
    out: set[int] = set()
    for e in X:
        out |= hit_set(inst, M, e)
    return frozenset(out)


@dataclass(frozen=True)
class ExtendedMatching:
    """A distance matching together with a multiset of loops on S-nodes."""

    matching: frozenset[int]
    loops: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "matching", frozenset(self.matching))
        merged: dict[int, int] = defaultdict(int)
        for s, c in self.loops:
            merged[s] += c
        object.__setattr__(self, "loops", tuple(sorted((s, c) for s, c in merged.items() if c)))

    @property
    def loop_items(self) -> frozenset[Loop]:
        return frozenset(Loop(s, j) for s, c in self.loops for j in range(c))

    def loops_at(self, s: int) -> frozenset[Loop]:
        return frozenset(Loop(s, j) for q, c in self.loops if q == s for j in range(c))

    @property
    def size(self) -> int:
        return len(self.matching) + sum(c for _, c in self.loops)


HitItem = Union[int, Loop]


def hit_set_plus(inst: Instance, EM: ExtendedMatching, e: HitItem) -> frozenset:
    """Hit set in the loop-extended setting.

    A graph edge ``st`` hits its ordinary hit set plus every loop at ``s``;
    a loop hits only itself.
    """
    if isinstance(e, Loop):
        if e not in EM.loop_items:
            raise InputError(f"loop {e} is not part of the extended matching")
        return frozenset([e])
    return hit_set(inst, EM.matching, e) | EM.loops_at(inst.edges[e].s)


def hit_set_plus_union(inst: Instance, EM: ExtendedMatching, X: Iterable[HitItem]) -> frozenset:
    out: set = set()
    for e in X:
        out |= hit_set_plus(inst, EM, e)
    return frozenset(out)


# --------------------------------------------------------------------------
# reductions


def to_perfect(inst: Instance) -> Instance:
    """Give each ``s_i`` a private zero-weight edge to a new node ``t_{k+i}``."""
    if inst.mode is Mode.PERFECT:
        raise InputError("instance is already in perfect mode")
    extra = tuple(Edge(i, inst.k + i, Fraction(0)) for i in range(1, inst.n + 1))
    return inst.replace(k=inst.k + inst.n, edges=inst.edges + extra, mode=Mode.PERFECT)

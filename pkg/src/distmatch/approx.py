"""Approximation algorithms and local search.

``greedy`` (weighted, factor 3), ``s_greedy`` / ``t_greedy`` (cardinality,
factor 2), ``window_partition`` (factor ``2 - 1/d``) and l-local search with
the guarantee table ``rho``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, NamedTuple, Sequence

from .core import (
    Builder,
    ExtendedMatching,
    InputError,
    Instance,
    SizeError,
    Variant,
    hit_set_plus,
    is_feasible,
    weight,
)
from .exact import max_weight_bipartite_matching

MAX_LOCAL_L = 5


# --------------------------------------------------------------------------
# greedy family


def conflict_counts(inst: Instance) -> list[int]:
    """Number of other edges each edge conflicts with."""
    counts = [0] * inst.m
    for a in range(inst.m):
        for b in range(a + 1, inst.m):
            if inst.conflict(a, b):
                counts[a] += 1
                counts[b] += 1
    return counts


def greedy_order(inst: Instance, order: Sequence[int] | str | None = None) -> list[int]:
    """Scan order used by :func:`greedy`.

    Default: weight descending, ties by ``(s, t)``.  ``"adversarial"`` breaks
    weight ties by descending conflict count instead, which reproduces the
    worst cases of the factor-3 analysis.  An explicit list only breaks
    weight ties: listed edges come first in list order, then the rest by id.
    """
    default = sorted(range(inst.m), key=lambda e: (-inst.edges[e].weight, e))
    if order is None:
        return default
    if isinstance(order, str):
        if order != "adversarial":
            raise InputError(f"unknown order {order!r}")
        cc = conflict_counts(inst)
        return sorted(range(inst.m), key=lambda e: (-inst.edges[e].weight, -cc[e], e))
    order = list(order)
    if len(set(order)) != len(order) or any(not 0 <= e < inst.m for e in order):
        raise InputError("edge order must list distinct valid edge ids")
    rank = {e: i for i, e in enumerate(order)}
    return sorted(range(inst.m), key=lambda e: (-inst.edges[e].weight, rank.get(e, len(order)), e))


def greedy(inst: Instance, order: Sequence[int] | str | None = None) -> frozenset[int]:
    """Add edges one by one whenever feasibility is kept.

    Negative edges are skipped.  Zero-weight edges are kept in the scan so
    that the output is always maximal (1-locally optimal).
    """
    b = Builder(inst)
    for e in greedy_order(inst, order):
        if inst.edges[e].weight >= 0 and b.can_add(e):
            b.add(e)
    return b.matching


def s_greedy(inst: Instance) -> frozenset[int]:
    """Match each ``s_i`` in turn to its feasible neighbour of smallest index."""
    b = Builder(inst)
    for s in range(1, inst.n + 1):
        for e in inst.at_s[s]:
            if b.can_add(e):
                b.add(e)
                break
    return b.matching


def t_greedy(inst: Instance) -> frozenset[int]:
    """For each T-node sweep S left to right, claiming free neighbours d apart."""
    if inst.variant is not Variant.LINE:
        raise InputError("t_greedy is defined for the line variant only")
    claimed: set[int] = set()
    out = []
    for t in range(1, inst.k + 1):
        i = 1
        while i <= inst.n:
            e = inst.edge_id.get((i, t))
            if e is not None and i not in claimed:
                claimed.add(i)
                out.append(e)
                i += inst.d
            else:
                i += 1
    return frozenset(out)


def window_padding(n: int, d: int) -> int:
    """Smallest ``p`` in ``d-1 .. 3d-3`` with ``2d-1`` dividing ``n + p``."""
    for p in range(d - 1, 3 * d - 2):
        if (n + p) % (2 * d - 1) == 0:
            return p
    raise AssertionError("unreachable: 2d-1 consecutive values cover all residues")


def window_partitions(inst: Instance) -> list[frozenset[int]]:
    """The candidate matchings ``M_1 .. M_{2d-1}`` of the window algorithm.

    S is padded with dummy nodes and closed into a cycle of length divisible
    by ``2d-1``.  ``M_i`` joins independent maximum-weight matchings of the
    windows of ``d`` nodes starting at ``i, i + 2d-1, ...``; consecutive
    windows are ``d-1`` nodes apart, so no two of them conflict.
    """
    if inst.variant is not Variant.LINE:
        raise InputError("window_partition is defined for the line variant only")
    n, d = inst.n, inst.d
    span = 2 * d - 1
    total = n + window_padding(n, d)
    cache: dict[int, frozenset[int]] = {}

    def block(j: int) -> frozenset[int]:
        if j not in cache:
            nodes = [(j - 1 + r) % total + 1 for r in range(d)]
            nodes = [s for s in nodes if s <= n]
            cache[j] = max_weight_bipartite_matching(inst, nodes) if nodes else frozenset()
        return cache[j]

    out = []
    for i in range(1, span + 1):
        M: set[int] = set()
        for j in range(i, total + 1, span):
            M |= block(j)
        out.append(frozenset(M))
    return out


def window_partition(inst: Instance) -> frozenset[int]:
    """Heaviest of the ``2d-1`` window partitions; earliest offset on ties."""
    if inst.n == 0:
        return frozenset()
    cands = window_partitions(inst)
    best = cands[0]
    for M in cands[1:]:
        if weight(inst, M) > weight(inst, best):
            best = M
    return best


def window_factor(d: int) -> Fraction:
    return 2 - Fraction(1, d)


# --------------------------------------------------------------------------
# local search


@lru_cache(maxsize=None)
def rho(l: int) -> Fraction:
    """Approximation guarantee of l-locally optimal solutions."""
    if not isinstance(l, int) or l < 1:
        raise InputError(f"rho needs a positive integer, got {l!r}")
    if l == 1:
        return Fraction(3)
    if l == 2:
        return Fraction(2)
    prev = rho(l - 2)
    return (4 * prev - 3) / (2 * prev - 1)


class Witness(NamedTuple):
    """An improving set ``X`` and the matching elements it hits."""

    X: frozenset
    hit: frozenset


def _search(
    cands: Sequence,
    hit_of: Callable[[object], frozenset],
    compatible: Callable[[list, object], bool],
    l: int,
) -> Witness | None:
    """First ``X`` (DFS in candidate order) with ``l >= |X| > |hit(X)|``."""
    X: list = []

    def dfs(start: int, hit: frozenset) -> Witness | None:
        for idx in range(start, len(cands)):
            e = cands[idx]
            if not compatible(X, e):
                continue
            X.append(e)
            h = hit | hit_of(e)
            if len(X) > len(h):
                return Witness(frozenset(X), h)
            # a larger X can only win while |hit| < l
            if len(X) < l and len(h) < l:
                found = dfs(idx + 1, h)
                if found:
                    return found
            X.pop()
        return None

    return dfs(0, frozenset())


def _check_l(l: int, max_l: int) -> None:
    if not isinstance(l, int) or l < 1:
        raise InputError(f"l must be a positive integer, got {l!r}")
    if l > max_l:
        raise SizeError(f"l={l} exceeds the local search limit {max_l}")


def find_improvement(
    inst: Instance, M: Iterable[int], l: int, *, max_l: int = MAX_LOCAL_L
) -> Witness | None:
    """Feasible ``X`` outside ``M`` with ``l >= |X| > |H(X, M)|``, or ``None``."""
    _check_l(l, max_l)
    M = frozenset(M)
    feas = is_feasible(inst, M, perfect=False)
    if not feas:
        raise InputError(f"matching is infeasible: {feas.describe(inst)}")
    mb = Builder(inst, M)
    cands = [e for e in range(inst.m) if e not in M]

    def compatible(X: list, e: int) -> bool:
        return all(not inst.conflict(e, f) for f in X)

    return _search(cands, lambda e: frozenset(mb.conflicts(e)), compatible, l)


def is_locally_optimal(inst: Instance, M: Iterable[int], l: int, *, max_l: int = MAX_LOCAL_L) -> bool:
    return find_improvement(inst, M, l, max_l=max_l) is None


def local_search(
    inst: Instance,
    l: int,
    init: Iterable[int] | None = None,
    *,
    max_l: int = MAX_LOCAL_L,
) -> frozenset[int]:
    """Apply improving swaps ``M <- (M - H(X)) + X`` until none is left.

    Sizes only matter here (weights are ignored).  The default start is the
    greedy matching of the unit-weight instance.
    """
    _check_l(l, max_l)
    M = greedy(inst.unweighted()) if init is None else frozenset(init)
    while True:
        w = find_improvement(inst, M, l, max_l=max_l)
        if w is None:
            return M
        nxt = (M - w.hit) | w.X
        assert len(nxt) == len(M) + len(w.X) - len(w.hit) > len(M)
        M = nxt


def find_improvement_wrt(
    inst: Instance, EM: ExtendedMatching, EM_star: ExtendedMatching, l: int, *, max_l: int = MAX_LOCAL_L
) -> Witness | None:
    """Improving set drawn from ``EM_star - EM`` under loop-aware hit sets.

    Both extended matchings must carry the same loop multiset; the
    candidates are then the graph edges of ``EM_star`` not in ``EM``.
    """
    _check_l(l, max_l)
    if EM.loops != EM_star.loops:
        raise InputError("extended matchings must share the same loop multiset")
    for em in (EM, EM_star):
        feas = is_feasible(inst, em.matching, perfect=False)
        if not feas:
            raise InputError(f"matching is infeasible: {feas.describe(inst)}")
    cands = sorted(EM_star.matching - EM.matching)
    return _search(cands, lambda e: hit_set_plus(inst, EM, e), lambda X, e: True, l)


def is_locally_optimal_wrt(
    inst: Instance, EM: ExtendedMatching, EM_star: ExtendedMatching, l: int, *, max_l: int = MAX_LOCAL_L
) -> bool:
    return find_improvement_wrt(inst, EM, EM_star, l, max_l=max_l) is None


GUARANTEES = {
    "greedy": lambda inst, l=None: Fraction(3),
    "sgreedy": lambda inst, l=None: Fraction(2),
    "tgreedy": lambda inst, l=None: Fraction(2),
    "window": lambda inst, l=None: window_factor(inst.d),
    "local": lambda inst, l=1: rho(l),
}

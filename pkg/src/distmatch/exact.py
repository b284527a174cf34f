"""Exact solvers.

``solve_fpt`` is the window dynamic program (exponential only in ``d``),
``solve_constant_t`` the cooldown dynamic program (exponential only in
``|T|``) and ``solve_bruteforce`` a plain branch and bound used as the
independent oracle for the other two.  All three accept both modes and both
variants and return a :class:`Solution`.
"""

from __future__ import annotations

import sys
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import product
from math import lcm
from typing import Callable, Iterable

from .core import Builder, Instance, Mode, SizeError, Variant, to_perfect, weight

BRUTEFORCE_EDGE_LIMIT = 30


@dataclass(frozen=True)
class Solution:
    """Optimal matching and its value; both ``None`` when infeasible."""

    matching: frozenset[int] | None
    value: Fraction | None
    states: int = 0

    @property
    def feasible(self) -> bool:
        return self.matching is not None


INFEASIBLE = Solution(None, None)


def _heaviest(inst: Instance, s: int, count: int, exclude=()) -> list[int]:
    """The ``count`` heaviest edges at ``s``; ties keep the smaller t-index."""
    ids = [e for e in inst.at_s[s] if inst.edges[e].t not in exclude]
    ids.sort(key=lambda e: (-inst.edges[e].weight, inst.edges[e].t))
    return ids[:count]


def prune_degrees(inst: Instance) -> Instance:
    """Keep only the ``2d-1`` heaviest edges at every S-node.

    A lightest edge at a node of degree at least ``2d`` can always be swapped
    for a free heavier one, so the optimum is unchanged.
    """
    keep = 2 * inst.d - 1
    kept = sorted(e for s in range(1, inst.n + 1) for e in _heaviest(inst, s, keep))
    if len(kept) == inst.m:
        return inst
    return inst.replace(edges=tuple(inst.edges[e] for e in kept))


def _lift(inst: Instance, sub: Instance, M: Iterable[int]) -> frozenset[int]:
    """Map edge ids of a derived instance back to ``inst`` (dropping extras)."""
    out = set()
    for s, t in sub.pairs(M):
        e = inst.edge_id.get((s, t))
        if e is not None:
            out.add(e)
    return frozenset(out)


# --------------------------------------------------------------------------
# plain bipartite matching


def max_weight_bipartite_matching(
    inst: Instance, s_nodes: Iterable[int] | None = None, *, perfect: bool = False
) -> frozenset[int] | None:
    """Maximum-weight matching between ``s_nodes`` and T, ignoring distances.

    Successive longest augmenting paths (Bellman-Ford on the residual graph)
    over exact integers.  Weights are scaled and perturbed by distinct powers
    of two so the optimum is unique: among equal-weight optima the one
    containing the smallest edge of any symmetric difference wins.

    With ``perfect=True`` every node of ``s_nodes`` must be covered (any
    weight signs allowed); ``None`` is returned when that is impossible.
    Otherwise only positive-weight edges are used.
    """
    s_nodes = list(range(1, inst.n + 1) if s_nodes is None else s_nodes)
    cand = [e for s in s_nodes for e in inst.at_s[s]]
    if not perfect:
        cand = [e for e in cand if inst.edges[e].weight > 0]
    cand.sort()
    m = len(cand)
    den = reduce(lcm, (inst.edges[e].weight.denominator for e in cand), 1)
    scaled = {}
    for rank, e in enumerate(cand):
        w = inst.edges[e].weight
        scaled[e] = (w.numerator * (den // w.denominator) << m) + (1 << (m - 1 - rank))
    adj: dict[int, list[int]] = defaultdict(list)
    for e in cand:
        adj[inst.edges[e].s].append(e)

    match_s: dict[int, int] = {}
    match_t: dict[int, int] = {}
    while len(match_s) < len(s_nodes):
        dist_s = {s: 0 for s in s_nodes if s not in match_s}
        dist_t: dict[int, int] = {}
        pred: dict[int, int] = {}
        changed = True
        while changed:
            changed = False
            for s, ds in list(dist_s.items()):
                for e in adj[s]:
                    if match_s.get(s) == e:
                        continue
                    t = inst.edges[e].t
                    val = ds + scaled[e]
                    if t not in dist_t or val > dist_t[t]:
                        dist_t[t], pred[t] = val, e
                        changed = True
            for t, dt in list(dist_t.items()):
                if t in match_t:
                    e = match_t[t]
                    s = inst.edges[e].s
                    val = dt - scaled[e]
                    if s not in dist_s or val > dist_s[s]:
                        dist_s[s] = val
                        changed = True
        free = [t for t in dist_t if t not in match_t]
        if not free:
            break
        end = max(free, key=lambda t: dist_t[t])
        if not perfect and dist_t[end] <= 0:
            break
        t = end
        while True:
            e = pred[t]
            s = inst.edges[e].s
            old = match_s.get(s)
            match_s[s] = e
            match_t[t] = e
            if old is None:
                break
            t = inst.edges[old].t
    if perfect and len(match_s) < len(s_nodes):
        return None
    return frozenset(match_s.values())


# --------------------------------------------------------------------------
# brute force oracle


def solve_bruteforce(inst: Instance, *, limit: int = BRUTEFORCE_EDGE_LIMIT) -> Solution:
    """Branch and bound over S-nodes; works for both variants directly.

    Each node tries its edges in t order and then (maximum mode) staying
    unmatched; the first optimum found in this order is kept.
    """
    if inst.m > limit:
        raise SizeError(f"brute force refuses {inst.m} edges (limit {limit})")
    perfect = inst.mode is Mode.PERFECT
    n = inst.n
    best_w = []
    for s in range(1, n + 1):
        ws = [inst.edges[e].weight for e in inst.at_s[s]]
        if perfect:
            if not ws:
                return INFEASIBLE
            best_w.append(max(ws))
        else:
            best_w.append(max([w for w in ws if w > 0], default=Fraction(0)))
    bound = [Fraction(0)] * (n + 1)
    for i in range(n - 1, -1, -1):
        bound[i] = bound[i + 1] + best_w[i]

    builder = Builder(inst)
    chosen: list[int] = []
    best: list = [None, None]
    nodes = [0]

    def dfs(i: int, value: Fraction) -> None:
        nodes[0] += 1
        if i == n:
            if best[1] is None or value > best[1]:
                best[0], best[1] = frozenset(chosen), value
            return
        if best[1] is not None and value + bound[i] <= best[1]:
            return
        for e in inst.at_s[i + 1]:
            if builder.can_add(e):
                builder.add(e)
                chosen.append(e)
                dfs(i + 1, value + inst.edges[e].weight)
                chosen.pop()
                builder.remove(e)
        if not perfect:
            dfs(i + 1, value)

    _with_depth(n, lambda: dfs(0, Fraction(0)))
    if best[0] is None:
        return Solution(None, None, nodes[0])
    return Solution(best[0], best[1], nodes[0])


def _with_depth(depth: int, fn: Callable[[], None]) -> None:
    old = sys.getrecursionlimit()
    if depth + 200 > old:
        sys.setrecursionlimit(depth + 200)
    try:
        fn()
    finally:
        sys.setrecursionlimit(old)


# --------------------------------------------------------------------------
# cycle variant


def _all_conflict(inst: Instance) -> bool:
    """True when every two S-nodes are closer than ``d``."""
    if inst.variant is Variant.CYCLE:
        return inst.n <= 2 * inst.d - 2
    return inst.n <= inst.d


def _solve_cyclic(inst: Instance, line_solver: Callable[[Instance], Solution]) -> Solution:
    """Reduce a cycle instance to line instances by fixing ``s_1..s_{d-1}``.

    Every wrap-around conflict involves one of the first ``d-1`` nodes, so
    once their edges are fixed and the tail edges conflicting with them are
    deleted, the remaining problem is an ordinary line instance.
    """
    p = inst.d - 1
    perfect = inst.mode is Mode.PERFECT
    options = [list(inst.at_s[s]) + ([] if perfect else [None]) for s in range(1, p + 1)]
    line = inst.replace(variant=Variant.LINE)
    best = None
    states = 0
    for combo in product(*options):
        chosen = [e for e in combo if e is not None]
        if len({inst.edges[e].t for e in chosen}) < len(chosen):
            continue
        keep = []
        for e, edge in enumerate(inst.edges):
            if edge.s <= p:
                if e in chosen:
                    keep.append(edge)
            elif not any(inst.conflict(e, f) for f in chosen):
                keep.append(edge)
        sub = line.replace(edges=tuple(keep))
        sol = line_solver(sub)
        states += sol.states
        if sol.feasible and (best is None or sol.value > best[1]):
            best = (_lift(inst, sub, sol.matching), sol.value)
    if best is None:
        return Solution(None, None, states)
    return Solution(best[0], best[1], states)


# --------------------------------------------------------------------------
# window dynamic program


def solve_fpt(inst: Instance, *, heavy_only: bool = False) -> Solution:
    """Window dynamic program over states ``(s_i, z_1, ..., z_d)``.

    ``z_j`` is the T-node given to ``s_{i-j+1}``.  Maximum mode is reduced
    to perfect mode by private zero-weight edges, then degrees are pruned to
    ``2d-1`` so each layer holds at most ``(2d-1)^d`` states.  With
    ``heavy_only`` a transition only looks at the ``d`` heaviest admissible
    edges of the node leaving the window.
    """
    if inst.variant is Variant.CYCLE and not _all_conflict(inst):
        return _solve_cyclic(inst, lambda sub: solve_fpt(sub, heavy_only=heavy_only))
    if inst.n == 0:
        return Solution(frozenset(), Fraction(0))
    work = to_perfect(inst) if inst.mode is Mode.MAXIMUM else inst
    work = prune_degrees(work)
    n, d = work.n, work.d

    if _all_conflict(work):
        M = max_weight_bipartite_matching(work, perfect=True)
        if M is None:
            return INFEASIBLE
        M = _lift(inst, work, M)
        return Solution(M, weight(inst, M), 1)

    nbrs = [()] + [tuple((work.edges[e].t, work.edges[e].weight) for e in work.at_s[s]) for s in range(1, n + 1)]
    layer: dict[tuple[int, ...], Fraction] = {}
    for combo in product(*(nbrs[s] for s in range(d, 0, -1))):
        ts = tuple(t for t, _ in combo)
        if len(set(ts)) == d:
            layer[ts] = sum((w for _, w in combo), Fraction(0))
    states = len(layer)
    back: list[dict] = []
    for i in range(d + 1, n + 1):
        leaving = i - d
        allowed_cache: dict[tuple[int, ...], set[int]] = {}
        new: dict[tuple[int, ...], Fraction] = {}
        ptr: dict[tuple[int, ...], tuple[int, ...]] = {}
        for prev, val in layer.items():
            tail = prev[:-1]
            if heavy_only:
                if tail not in allowed_cache:
                    allowed_cache[tail] = {
                        work.edges[e].t for e in _heaviest(work, leaving, d, exclude=set(tail))
                    }
                if prev[-1] not in allowed_cache[tail]:
                    continue
            for t, w in nbrs[i]:
                if t in tail:
                    continue
                key = (t,) + tail
                cand = val + w
                if key not in new or cand > new[key]:
                    new[key] = cand
                    ptr[key] = prev
        layer = new
        back.append(ptr)
        states += len(layer)
    if not layer:
        return Solution(None, None, states)
    final = max(layer, key=lambda z: layer[z])
    assert states <= n * (2 * d - 1) ** d
    # recover T-assignment from s_n backwards
    assign = {}
    state = final
    for i in range(n, d, -1):
        assign[i] = state[0]
        state = back[i - d - 1][state]
    for j, t in enumerate(state):
        assign[d - j] = t
    M = _lift(inst, work, [work.edge_id[(s, t)] for s, t in assign.items()])
    return Solution(M, weight(inst, M), states)


# --------------------------------------------------------------------------
# cooldown dynamic program


def solve_constant_t(inst: Instance) -> Solution:
    """Cooldown dynamic program over states ``(s_i, d_1, ..., d_k)``.

    ``d_j > 0`` means ``t_j`` is blocked on the last ``d_j`` nodes of the
    prefix ``s_1..s_i``.  The optimum is ``f(s_n, 0, ..., 0)``, which expands
    to the final maximisation over ``t`` including the weight of ``s_n``'s
    edge.  Maximum mode adds a transition that leaves ``s_i`` unmatched.
    """
    if inst.variant is Variant.CYCLE:
        if not _all_conflict(inst):
            return _solve_cyclic(inst, solve_constant_t)
        # every pair conflicts: same as a line instance with d = n
        line = inst.replace(variant=Variant.LINE, d=max(inst.n, 1))
        sol = solve_constant_t(line)
        if not sol.feasible:
            return sol
        return Solution(_lift(inst, line, sol.matching), sol.value, sol.states)

    n, k, d = inst.n, inst.k, inst.d
    perfect = inst.mode is Mode.PERFECT
    nbrs = [()] + [
        tuple((inst.edges[e].t - 1, inst.edges[e].weight, e) for e in inst.at_s[s]) for s in range(1, n + 1)
    ]
    memo: dict[tuple[int, tuple[int, ...]], tuple[Fraction | None, int | None]] = {}

    def f(i: int, cd: tuple[int, ...]) -> Fraction | None:
        if i == 0:
            return Fraction(0)
        key = (i, cd)
        if key in memo:
            return memo[key][0]
        base = tuple(c - 1 if c > 0 else 0 for c in cd)
        best: Fraction | None = None
        choice = None
        for j, w, e in nbrs[i]:
            if cd[j]:
                continue
            sub = f(i - 1, base[:j] + (d - 1,) + base[j + 1:])
            if sub is not None and (best is None or sub + w > best):
                best, choice = sub + w, e
        if not perfect:
            sub = f(i - 1, base)
            if best is None or sub > best:
                best, choice = sub, None
        memo[key] = (best, choice)
        return best

    start = (0,) * k
    value = None
    _with_depth(2 * n, lambda: memo.setdefault((-1, start), (f(n, start), None)))
    value = memo[(-1, start)][0]
    if value is None:
        return Solution(None, None, len(memo) - 1)
    M = []
    cd = start
    for i in range(n, 0, -1):
        _, e = memo[(i, cd)]
        cd = tuple(c - 1 if c > 0 else 0 for c in cd)
        if e is not None:
            M.append(e)
            j = inst.edges[e].t - 1
            cd = cd[:j] + (d - 1,) + cd[j + 1:]
    return Solution(frozenset(M), value, len(memo) - 1)


SOLVERS: dict[str, Callable[[Instance], Solution]] = {
    "fpt": solve_fpt,
    "ct": solve_constant_t,
    "brute": solve_bruteforce,
}

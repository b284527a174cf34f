"""Regular instances: recognition, perfect matchings and full decomposition.

An instance is r-regular when every S-node has degree ``r`` and every T-node
has exactly ``r`` edges into each window of ``d`` consecutive S-nodes.
Such an instance splits into ``r`` disjoint perfect distance matchings.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import InputError, Instance, Variant, is_feasible
from .exact import max_weight_bipartite_matching


@dataclass(frozen=True)
class RegularityCertificate:
    """Either ``r`` (regular) or the first violation found.

    A violation is ``(kind, node, window_start, observed)`` where ``kind``
    is ``"degree"`` (node is an S-index, no window) or ``"window"`` (node is
    a T-index).
    """

    r: int | None
    violation: tuple[str, int, int | None, int] | None = None

    @property
    def ok(self) -> bool:
        return self.r is not None

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return f"{self.r}-regular"
        kind, node, start, seen = self.violation
        if kind == "degree":
            return f"s{node} has degree {seen}"
        return f"t{node} has {seen} edges into the window starting at s{start}"


def check_regular(inst: Instance) -> RegularityCertificate:
    """Regularity test; for ``n < d`` the whole of S is the only window."""
    if inst.variant is not Variant.LINE:
        raise InputError("regularity is defined for the line variant only")
    if inst.n == 0:
        return RegularityCertificate(None, ("degree", 0, None, 0))
    r = inst.degree(1)
    for s in range(1, inst.n + 1):
        if inst.degree(s) != r or r == 0:
            return RegularityCertificate(None, ("degree", s, None, inst.degree(s)))
    for i in range(1, max(1, inst.n - inst.d + 1) + 1):
        hi = min(i + inst.d - 1, inst.n)
        for t in range(1, inst.k + 1):
            seen = sum(1 for e in inst.at_t[t] if i <= inst.edges[e].s <= hi)
            if seen != r:
                return RegularityCertificate(None, ("window", t, i, seen))
    return RegularityCertificate(r)


def regular_perfect(inst: Instance) -> frozenset[int]:
    """Perfect distance matching of a regular instance.

    The first ``d`` nodes get a perfect matching; after that ``s_i`` takes
    the T-node of ``s_{i-d}``.  The windows starting at ``s_{i-d}`` and
    ``s_{i-d+1}`` both hold ``r`` edges of that T-node and differ only in
    ``s_{i-d}`` and ``s_i``, so the edge always exists.
    """
    cert = check_regular(inst)
    if not cert:
        raise InputError(f"instance is not regular: {cert.describe()}")
    d = inst.d
    # weights play no part: unit weights make the tie-break lexicographic
    first = max_weight_bipartite_matching(inst.unweighted(), range(1, min(d, inst.n) + 1), perfect=True)
    if first is None:
        raise AssertionError("regular window without a perfect matching")
    partner = {inst.edges[e].s: inst.edges[e].t for e in first}
    M = set(first)
    for i in range(d + 1, inst.n + 1):
        t = partner[i - d]
        e = inst.edge_id.get((i, t))
        if e is None:
            raise AssertionError(f"extension failed at s{i}: no edge to t{t} (partner of s{i - d})")
        partner[i] = t
        M.add(e)
    M = frozenset(M)
    assert is_feasible(inst, M, perfect=True)
    return M


def regular_decompose(inst: Instance) -> list[frozenset[int]]:
    """Split a regular instance into ``r`` disjoint perfect distance matchings."""
    cert = check_regular(inst)
    if not cert:
        raise InputError(f"instance is not regular: {cert.describe()}")
    parts = []
    cur = inst
    for left in range(cert.r, 0, -1):
        M = regular_perfect(cur)
        parts.append(inst.matching(cur.pairs(M)))
        cur = cur.replace(edges=tuple(e for j, e in enumerate(cur.edges) if j not in M))
        if left > 1:
            nxt = check_regular(cur)
            assert nxt.r == left - 1, f"residual is not {left - 1}-regular: {nxt.describe()}"
    assert cur.m == 0
    return parts

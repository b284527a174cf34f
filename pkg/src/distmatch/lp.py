"""The LP relaxation and what is built on it.

``build_lp`` writes the relaxation (degree rows plus one window row per
T-node and window of ``d`` consecutive S-nodes), ``solve_lp_exact`` solves it
with the exact simplex, and the rest covers flat orders, LP rounding
(``wdm_lp_apx``), the coloring-based ``fractional_decompose`` and
``integrality_gap``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import floor, lcm
from typing import NamedTuple, Sequence

from .core import Builder, InputError, Instance, Mode, SizeError, Variant, right_window, weight
from .exact import _heaviest, solve_fpt
from .io import format_rational
from .simplex import Status, maximize

DECOMPOSE_LIMIT = 10_000


class Row(NamedTuple):
    coeffs: tuple[tuple[int, Fraction], ...]
    sense: str
    rhs: Fraction
    label: str


@dataclass(frozen=True)
class LinearProgram:
    """Maximise ``objective . x`` over ``x >= 0`` and ``rows``; one variable per edge."""

    nvars: int
    objective: tuple[Fraction, ...]
    rows: tuple[Row, ...]

    @property
    def degree_rows(self) -> tuple[Row, ...]:
        return tuple(r for r in self.rows if r.label.startswith("deg"))

    @property
    def window_rows(self) -> tuple[Row, ...]:
        return tuple(r for r in self.rows if r.label.startswith("win"))


@dataclass(frozen=True)
class LPSolution:
    status: Status
    x: tuple[Fraction, ...] | None
    value: Fraction | None
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        return self.status is Status.OPTIMAL

    @property
    def integral(self) -> bool:
        return self.x is not None and all(v.denominator == 1 for v in self.x)


def window_starts(inst: Instance) -> range:
    if inst.variant is Variant.CYCLE:
        return range(1, inst.n + 1)
    return range(1, max(1, inst.n - inst.d + 1) + 1)


def build_lp(inst: Instance, objective: Sequence | None = None) -> LinearProgram:
    """Degree rows (``<= 1``, or ``= 1`` in perfect mode) and window rows.

    Windows that would run past ``s_n`` in the line variant are contained in
    the last full window, so only starts ``1 .. n-d+1`` are emitted.
    """
    one = Fraction(1)
    sense = "=" if inst.mode is Mode.PERFECT else "<="
    rows = [
        Row(tuple((e, one) for e in inst.at_s[s]), sense, one, f"deg_s{s}")
        for s in range(1, inst.n + 1)
    ]
    size = min(inst.d, inst.n) if inst.variant is Variant.CYCLE else inst.d
    for t in range(1, inst.k + 1):
        for i in window_starts(inst):
            win = set(right_window(inst, i, size))
            support = tuple((e, one) for e in inst.at_t[t] if inst.edges[e].s in win)
            if support:
                rows.append(Row(support, "<=", one, f"win_t{t}_s{i}"))
    if objective is None:
        objective = [e.weight for e in inst.edges]
    objective = tuple(Fraction(w) for w in objective)
    if len(objective) != inst.m:
        raise InputError("objective length must equal the number of edges")
    return LinearProgram(inst.m, objective, tuple(rows))


def solve_lp_exact(lp: LinearProgram) -> LPSolution:
    """Optimal vertex of ``lp`` in exact rationals, or an infeasible result."""
    res = maximize(lp.objective, [(r.coeffs, r.sense, r.rhs) for r in lp.rows])
    if res.status is Status.UNBOUNDED:
        raise AssertionError("relaxation cannot be unbounded: every variable sits in a degree row")
    return LPSolution(res.status, res.x, res.value, res.pivots)


def lp_value(inst: Instance) -> Fraction | None:
    return solve_lp_exact(build_lp(inst)).value


def support_sets(inst: Instance) -> list[int]:
    """Edge ids of the ``min(2d-1, deg)`` heaviest edges at every S-node."""
    keep = 2 * inst.d - 1
    return sorted(e for s in range(1, inst.n + 1) for e in _heaviest(inst, s, keep))


def canonical_optimal(inst: Instance) -> LPSolution:
    """Optimal solution with no mass outside the heaviest edges of each node.

    Solved on the restricted edge set and padded with zeros.  Lifting
    works because any mass on a light edge can be moved to a heavier one.
    """
    keep = support_sets(inst)
    sub = inst.replace(edges=tuple(inst.edges[e] for e in keep))
    sol = solve_lp_exact(build_lp(sub))
    if not sol.feasible:
        return sol
    x = [Fraction(0)] * inst.m
    for j, e in enumerate(keep):
        x[e] = sol.x[j]
    return LPSolution(sol.status, tuple(x), sol.value, sol.pivots)


def check_fractional(inst: Instance, x: Sequence[Fraction]) -> None:
    """Raise ``InputError`` unless ``x`` satisfies the relaxation of ``inst``."""
    if len(x) != inst.m:
        raise InputError("x must have one entry per edge")
    if any(v < 0 for v in x):
        raise InputError("x must be non-negative")
    for row in build_lp(inst).rows:
        lhs = sum((x[e] * a for e, a in row.coeffs), Fraction(0))
        if lhs > row.rhs or (row.sense == "=" and lhs != row.rhs):
            raise InputError(f"x violates row {row.label}")


# --------------------------------------------------------------------------
# flat orders


@dataclass(frozen=True)
class FlatOrder:
    """Edge order with per-position slacks ``(xi, xi_bar)`` and its flatness."""

    order: tuple[int, ...]
    slacks: tuple[tuple[Fraction, Fraction], ...]
    theta: Fraction


def flat_theta(d: int) -> Fraction:
    return 2 - Fraction(1, 2 * d - 1)


def order_slacks(inst: Instance, x: Sequence[Fraction], order: Sequence[int]) -> list[tuple[Fraction, Fraction]]:
    """For each position: later mass at the same S-node, and later mass at the
    same T-node within distance ``< d``."""
    order = list(order)
    if sorted(order) != list(range(inst.m)):
        raise InputError("order must be a permutation of the edge ids")
    out = []
    zero = Fraction(0)
    for pos, e in enumerate(order):
        s, t, _ = inst.edges[e]
        xi = xi_bar = zero
        for f in order[pos + 1:]:
            sf, tf, _ = inst.edges[f]
            if sf == s:
                xi += x[f]
            elif tf == t and inst.dist(s, sf) < inst.d:
                xi_bar += x[f]
        out.append((xi, xi_bar))
    return out


def flatness_of(inst: Instance, x: Sequence[Fraction], order: Sequence[int]) -> Fraction:
    """Smallest ``theta`` for which ``order`` is theta-flat with respect to ``x``."""
    slacks = order_slacks(inst, x, order)
    return max((a + b + x[e] for (a, b), e in zip(slacks, order)), default=Fraction(0))


def flat_order(inst: Instance, x: Sequence[Fraction]) -> FlatOrder:
    """Nodes ``s_1 .. s_n`` in turn, each node's edges by decreasing ``x``.

    ``x`` must vanish outside the ``2d-1`` heaviest edges of every node
    (as returned by :func:`canonical_optimal`); the order is then
    ``(2 - 1/(2d-1))``-flat.
    """
    x = tuple(Fraction(v) for v in x)
    if len(x) != inst.m:
        raise InputError("x must have one entry per edge")
    allowed = set(support_sets(inst))
    for e, v in enumerate(x):
        if v and e not in allowed:
            raise InputError(f"x is positive on {inst.label(e)}, outside the heaviest-edge support")
    order = []
    for s in range(1, inst.n + 1):
        order += sorted(inst.at_s[s], key=lambda e: (-x[e], inst.edges[e].t))
    slacks = order_slacks(inst, x, order)
    theta = max((a + b + x[e] for (a, b), e in zip(slacks, order)), default=Fraction(0))
    return FlatOrder(tuple(order), tuple(slacks), theta)


# --------------------------------------------------------------------------
# rounding


def _hit_by(inst: Instance, e: int, f: int) -> bool:
    """Edges whose weight is reduced when ``e`` is taken: same S-node, or the
    same T-node within distance ``< d``."""
    a, b = inst.edges[e], inst.edges[f]
    return a.s == b.s or (a.t == b.t and inst.dist(a.s, b.s) < inst.d)


def round_in_order(inst: Instance, order: Sequence[int]) -> frozenset[int]:
    """Local-ratio rounding along ``order``.

    Forward sweep: take the next edge with positive residual weight and
    subtract that weight from every later edge it hits.  Backward sweep:
    add the taken edges in reverse whenever feasibility allows.
    """
    residual = {e: inst.edges[e].weight for e in order}
    order = list(order)
    stack = []
    for pos, e in enumerate(order):
        w = residual[e]
        if w <= 0:
            continue
        stack.append(e)
        for f in order[pos + 1:]:
            if _hit_by(inst, e, f):
                residual[f] -= w
    b = Builder(inst)
    for e in reversed(stack):
        if b.can_add(e):
            b.add(e)
    return b.matching


class LPRounding(NamedTuple):
    matching: frozenset[int]
    lp: LPSolution
    order: FlatOrder


def wdm_lp_apx_details(inst: Instance) -> LPRounding:
    inst = inst if inst.mode is Mode.MAXIMUM else inst.replace(mode=Mode.MAXIMUM)
    sol = canonical_optimal(inst)
    fo = flat_order(inst, sol.x)
    return LPRounding(round_in_order(inst, fo.order), sol, fo)


def wdm_lp_apx(inst: Instance) -> frozenset[int]:
    """LP-guided rounding with guarantee ``theta = 2 - 1/(2d-1)``."""
    return wdm_lp_apx_details(inst).matching


# --------------------------------------------------------------------------
# decomposition


@dataclass(frozen=True)
class Decomposition:
    K: int
    q: int
    parts: tuple[tuple[Fraction, frozenset[int]], ...]


def lcd(x: Sequence[Fraction]) -> int:
    return reduce(lcm, (Fraction(v).denominator for v in x), 1)


def fractional_decompose(
    inst: Instance, x: Sequence[Fraction], order: Sequence[int], theta: Fraction
) -> Decomposition:
    """Write ``x`` as ``sum (1/K) chi(M_i)`` over ``q = floor(K theta)`` matchings.

    Edges are colored from the back of the order; each edge takes the
    ``K x_e`` smallest colors not used by later edges at its S-node or at
    its T-node within distance ``< d``.  Theta-flatness guarantees enough
    free colors.
    """
    x = tuple(Fraction(v) for v in x)
    theta = Fraction(theta)
    K = lcd(x)
    if K * theta > DECOMPOSE_LIMIT:
        raise SizeError(f"K*theta = {K * theta} exceeds {DECOMPOSE_LIMIT}")
    if flatness_of(inst, x, order) > theta:
        raise InputError("order is not theta-flat with respect to x")
    q = floor(K * theta)
    colors: dict[int, set[int]] = {}
    order = list(order)
    for pos in range(len(order) - 1, -1, -1):
        e = order[pos]
        need = int(K * x[e])
        if not need:
            continue
        used: set[int] = set()
        for f in order[pos + 1:]:
            if f in colors and _hit_by(inst, e, f):
                used |= colors[f]
        free = [c for c in range(1, q + 1) if c not in used]
        if len(free) < need:
            raise AssertionError("flatness violated: not enough free colors")
        colors[e] = set(free[:need])
    classes = [set() for _ in range(q + 1)]
    for e, cs in colors.items():
        for c in cs:
            classes[c].add(e)
    lam = Fraction(1, K)
    return Decomposition(K, q, tuple((lam, frozenset(classes[c])) for c in range(1, q + 1)))


def integrality_gap(inst: Instance) -> Fraction:
    """LP optimum over integer optimum in maximum mode (``0/0`` counts as 1)."""
    inst = inst if inst.mode is Mode.MAXIMUM else inst.replace(mode=Mode.MAXIMUM)
    lp = lp_value(inst)
    ip = solve_fpt(inst).value
    if ip == 0:
        assert lp == 0, "positive LP value with zero integer optimum"
        return Fraction(1)
    return lp / ip


# --------------------------------------------------------------------------
# export


def export_lp(lp: LinearProgram) -> str:
    """Plain-text LP (CPLEX-like layout) with exact ``p/q`` coefficients."""

    def term(coef: Fraction, j: int, first: bool) -> str:
        sign = "-" if coef < 0 else ("" if first else "+")
        mag = format_rational(abs(coef))
        body = f"x{j + 1}" if mag == "1" else f"{mag} x{j + 1}"
        return f"{sign} {body}".strip() if first else f"{sign} {body}"

    def expr(pairs) -> str:
        pairs = [(j, c) for j, c in pairs if c != 0]
        if not pairs:
            return "0"
        return " ".join(term(c, j, i == 0) for i, (j, c) in enumerate(pairs))

    out = ["maximize", f" obj: {expr(enumerate(lp.objective))}", "subject to"]
    for r in lp.rows:
        out.append(f" {r.label}: {expr(r.coeffs)} {r.sense} {format_rational(r.rhs)}")
    out.append("bounds")
    out += [f" x{j + 1} >= 0" for j in range(lp.nvars)]
    out.append("end")
    return "\n".join(out) + "\n"

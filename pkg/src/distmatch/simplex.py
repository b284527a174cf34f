"""Dense two-phase simplex over exact integers.

The tableau is kept fraction-free: an integer matrix ``T`` and a positive
integer ``D`` with the true tableau equal to ``T / D``.  A pivot on ``T[r][c]``
updates every other row as ``(T_ij * p - T_ic * T_rj) / D`` (always an exact
division) and sets ``D`` to the pivot.  Bland's rule picks entering and
leaving variables, so the method terminates on degenerate problems.

Constraint rows are scaled to integers by their own common denominator; the
slack and artificial variables of a row are scaled along with it, which
keeps the starting basis the identity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Iterable, Sequence


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class SimplexResult:
    status: Status
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None
    pivots: int = 0


def _scale(values: Iterable[Fraction]) -> tuple[list[int], int]:
    values = [Fraction(v) for v in values]
    den = reduce(lcm, (v.denominator for v in values), 1)
    return [int(v * den) for v in values], den


class _Tableau:
    def __init__(self, rows: list[list[int]], basis: list[int]):
        self.T = rows
        self.basis = basis
        self.D = 1
        self.pivots = 0

    def pivot(self, r: int, c: int, obj: list[int]) -> None:
        T, D = self.T, self.D
        prow = T[r]
        p = prow[c]
        width = len(prow)
        for row in (*T[:r], *T[r + 1:], obj):
            f = row[c]
            if f == 0:
                if p != D:
                    for j in range(width):
                        row[j] = row[j] * p // D
            else:
                for j in range(width):
                    row[j] = (row[j] * p - f * prow[j]) // D
        if p < 0:
            for row in (*T, obj):
                for j in range(width):
                    row[j] = -row[j]
            p = -p
        self.D = p
        self.basis[r] = c
        self.pivots += 1

    def run(self, obj: list[int], allowed: Sequence[bool]) -> bool:
        """Optimise ``obj`` in place; False when unbounded."""
        T = self.T
        rhs = len(obj) - 1
        while True:
            enter = next((j for j in range(rhs) if allowed[j] and obj[j] < 0), None)
            if enter is None:
                return True
            best = None
            for r, row in enumerate(T):
                a = row[enter]
                if a <= 0:
                    continue
                if best is None:
                    best = r
                    continue
                lhs = row[rhs] * T[best][enter]
                rhs_b = T[best][rhs] * a
                if lhs < rhs_b or (lhs == rhs_b and self.basis[r] < self.basis[best]):
                    best = r
            if best is None:
                return False
            self.pivot(best, enter, obj)


def maximize(
    c: Sequence[Fraction],
    rows: Sequence[tuple[Sequence[tuple[int, Fraction]], str, Fraction]],
) -> SimplexResult:
    """Maximise ``c.x`` subject to ``rows`` and ``x >= 0``.

    Each row is ``(coefficients, sense, rhs)`` with sparse ``(var, coef)``
    coefficients and sense one of ``"<="``, ``">="``, ``"="``.
    """
    nx = len(c)
    prepared = []
    for coeffs, sense, rhs in rows:
        if sense not in ("<=", ">=", "="):
            raise ValueError(f"bad constraint sense {sense!r}")
        dense = [Fraction(0)] * nx
        for j, a in coeffs:
            dense[j] += Fraction(a)
        rhs = Fraction(rhs)
        if rhs < 0:
            dense = [-a for a in dense]
            rhs = -rhs
            sense = {"<=": ">=", ">=": "<=", "=": "="}[sense]
        ints, _ = _scale(dense + [rhs])
        prepared.append((ints[:-1], sense, ints[-1]))

    n_slack = sum(1 for _, s, _ in prepared if s != "=")
    n_art = sum(1 for _, s, _ in prepared if s != "<=")
    width = nx + n_slack + n_art + 1
    rhs_col = width - 1
    T: list[list[int]] = []
    basis: list[int] = []
    art_cols: list[int] = []
    slack_at = nx
    art_at = nx + n_slack
    for ints, sense, b in prepared:
        row = ints + [0] * (width - nx)
        row[rhs_col] = b
        if sense == "<=":
            row[slack_at] = 1
            basis.append(slack_at)
            slack_at += 1
        else:
            if sense == ">=":
                row[slack_at] = -1
                slack_at += 1
            row[art_at] = 1
            basis.append(art_at)
            art_cols.append(art_at)
            art_at += 1
        T.append(row)
    tab = _Tableau(T, basis)
    is_art = [False] * width
    for j in art_cols:
        is_art[j] = True

    if art_cols:
        obj = [0] * width
        for j in art_cols:
            obj[j] = 1
        for r, bcol in enumerate(basis):
            if is_art[bcol]:
                obj = [o - v for o, v in zip(obj, T[r])]
        tab.run(obj, [j < rhs_col for j in range(width)])
        if obj[rhs_col] < 0:
            return SimplexResult(Status.INFEASIBLE, pivots=tab.pivots)
        # move zero-level artificials out of the basis, dropping redundant rows
        r = 0
        while r < len(tab.T):
            if is_art[tab.basis[r]]:
                col = next((j for j in range(rhs_col) if not is_art[j] and tab.T[r][j] != 0), None)
                if col is None:
                    del tab.T[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, col, obj)
            r += 1

    cint, cden = _scale(list(c))
    D = tab.D
    obj = [0] * width
    for j in range(nx):
        obj[j] = -cint[j] * D
    for r, bcol in enumerate(tab.basis):
        if bcol < nx and cint[bcol]:
            f = cint[bcol]
            obj = [o + f * v for o, v in zip(obj, tab.T[r])]
    allowed = [j < rhs_col and not is_art[j] for j in range(width)]
    if not tab.run(obj, allowed):
        return SimplexResult(Status.UNBOUNDED, pivots=tab.pivots)
    D = tab.D
    x = [Fraction(0)] * nx
    for r, bcol in enumerate(tab.basis):
        if bcol < nx:
            x[bcol] = Fraction(tab.T[r][rhs_col], D)
    value = Fraction(obj[rhs_col], D * cden)
    assert value == sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return SimplexResult(Status.OPTIMAL, tuple(x), value, tab.pivots)

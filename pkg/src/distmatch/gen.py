"""Instance generators: random, r-regular and the 3DM reduction.

Randomness comes from numpy's PCG64 bit generator.  A suite seed is expanded
with ``SeedSequence.spawn`` so every instance gets an independent stream and
the output does not depend on platform or generation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .core import Edge, InputError, Instance, Mode, Variant


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def spawn_seeds(seed: int, count: int) -> list[np.random.SeedSequence]:
    """Independent child seeds for a suite of ``count`` instances."""
    return np.random.SeedSequence(int(seed)).spawn(count)


def _draw_weight(rng: np.random.Generator, weights, denominator: int) -> Fraction:
    if weights is None:
        return Fraction(1)
    lo, hi = (Fraction(w) for w in weights)
    a, b = lo * denominator, hi * denominator
    if a.denominator != 1 or b.denominator != 1:
        raise InputError("weight range endpoints must be multiples of 1/denominator")
    return Fraction(int(rng.integers(int(a), int(b), endpoint=True)), denominator)


def gen_random(
    n: int,
    k: int,
    d: int,
    density=Fraction(1, 2),
    weights=(1, 10),
    seed=0,
    *,
    denominator: int = 1,
    mode: Mode | str = Mode.MAXIMUM,
    variant: Variant | str = Variant.LINE,
) -> Instance:
    """Each ``(s, t)`` pair is kept independently with probability ``density``.

    ``weights=None`` gives unit weights; otherwise weights are uniform over the
    multiples of ``1/denominator`` in the closed range.
    """
    density = Fraction(density)
    if not 0 <= density <= 1:
        raise InputError("density must lie in [0, 1]")
    if denominator < 1:
        raise InputError("denominator must be positive")
    rng = make_rng(seed)
    edges = []
    for s in range(1, n + 1):
        for t in range(1, k + 1):
            if int(rng.integers(0, density.denominator)) < density.numerator:
                edges.append(Edge(s, t, _draw_weight(rng, weights, denominator)))
    return Instance(n, k, d, tuple(edges), Variant(variant), Mode(mode))


def gen_regular(n: int, d: int, r: int, seed=None, *, weights=(1, 10)) -> Instance:
    """An r-regular perfect-mode instance with ``k = d``.

    ``s_i`` is joined to ``t_j`` iff ``(i-1) mod d`` is one of the ``r``
    residues ``j-1, ..., j+r-2`` (mod d), so every d-window holds each residue
    once.  A seed shuffles the T labels and draws random integer weights;
    without a seed the labels stay put and weights are 1.
    """
    if not 1 <= r <= d:
        raise InputError(f"need 1 <= r <= d, got r={r}, d={d}")
    if n < d:
        raise InputError(f"need n >= d for a full window, got n={n}, d={d}")
    if seed is None:
        perm = list(range(1, d + 1))
        rng = None
    else:
        rng = make_rng(seed)
        perm = [int(x) + 1 for x in rng.permutation(d)]
    edges = []
    for i in range(1, n + 1):
        res = (i - 1) % d
        for j in range(1, d + 1):
            if (res - (j - 1)) % d < r:
                w = Fraction(1) if rng is None else _draw_weight(rng, weights, 1)
                edges.append(Edge(i, perm[j - 1], w))
    return Instance(n, d, d, tuple(edges), Variant.LINE, Mode.PERFECT)


# --------------------------------------------------------------------------
# 3-dimensional matching


@dataclass(frozen=True)
class ThreeDimMatching:
    """Elements are ``1..q`` in each of X, Y, Z; hyperedges are triples."""

    q: int
    hyperedges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.q < 0:
            raise InputError("q must be non-negative")
        hs = tuple(tuple(h) for h in self.hyperedges)
        if len(set(hs)) != len(hs):
            raise InputError("duplicate hyperedge")
        for h in hs:
            if len(h) != 3 or not all(1 <= c <= self.q for c in h):
                raise InputError(f"hyperedge {h} out of range")
        object.__setattr__(self, "hyperedges", hs)

    def has_perfect(self) -> bool:
        """Brute force: is there a set of ``q`` pairwise disjoint triples?"""
        for F in combinations(self.hyperedges, self.q):
            if all(len({h[c] for h in F}) == self.q for c in range(3)):
                return True
        return False

    def max_occurrence(self) -> int:
        counts: dict[tuple[int, int], int] = {}
        for h in self.hyperedges:
            for c in range(3):
                counts[(c, h[c])] = counts.get((c, h[c]), 0) + 1
        return max(counts.values(), default=0)


def gen_from_3dm(tdm: ThreeDimMatching) -> Instance:
    """Perfect distance matching instance equisatisfiable with ``tdm``.

    The intermediate graph has S = X, the non-first hyperedges of each z, and
    Y; T is the set of hyperedges ordered by z.  S is laid out as
    ``X, pad, hyperedge copies, pad, Y`` with ``|X|`` and ``|Y|`` padding
    nodes, each padding node owning a private T-node, and ``d`` is the size
    of S before padding.  Anything in X conflicts with every hyperedge copy,
    likewise Y, while X and Y are at least ``d`` apart.
    """
    q = tdm.q
    by_z: dict[int, list[int]] = {z: [] for z in range(1, q + 1)}
    for idx, h in enumerate(tdm.hyperedges):
        by_z[h[2]].append(idx)
    t_order = [idx for z in range(1, q + 1) for idx in by_z[z]]
    t_of = {idx: pos + 1 for pos, idx in enumerate(t_order)}
    copies = [(z, i) for z in range(1, q + 1) for i in range(1, len(by_z[z]))]
    size = 2 * q + len(copies)
    pad = q

    comments = [f"3dm reduction: q={q}, {len(tdm.hyperedges)} hyperedges"]
    edges: list[Edge] = []
    one = Fraction(1)
    pos = 0
    x_pos = {}
    for x in range(1, q + 1):
        pos += 1
        x_pos[x] = pos
        comments.append(f"s{pos} = x{x}")
    pad1 = list(range(pos + 1, pos + pad + 1))
    pos += pad
    copy_pos = {}
    for z, i in copies:
        pos += 1
        copy_pos[(z, i)] = pos
        h = tdm.hyperedges[by_z[z][i]]
        comments.append(f"s{pos} = copy of hyperedge {h}")
    pad2 = list(range(pos + 1, pos + pad + 1))
    pos += pad
    y_pos = {}
    for y in range(1, q + 1):
        pos += 1
        y_pos[y] = pos
        comments.append(f"s{pos} = y{y}")
    n = pos
    k = len(t_order)
    for idx in t_order:
        comments.append(f"t{t_of[idx]} = hyperedge {tdm.hyperedges[idx]}")
    for idx, (x, y, z) in enumerate(tdm.hyperedges):
        edges.append(Edge(x_pos[x], t_of[idx], one))
        edges.append(Edge(y_pos[y], t_of[idx], one))
    for z, i in copies:
        s = copy_pos[(z, i)]
        edges.append(Edge(s, t_of[by_z[z][i - 1]], one))
        edges.append(Edge(s, t_of[by_z[z][i]], one))
    for s in pad1 + pad2:
        k += 1
        edges.append(Edge(s, k, one))
        comments.append(f"s{s} = padding, private t{k}")
    inst = Instance(n, k, max(size, 1), tuple(edges), Variant.LINE, Mode.PERFECT, (), tuple(comments))
    if tdm.max_occurrence() <= 3:
        deg_s = max((len(a) for a in inst.at_s[1:]), default=0)
        deg_t = max((len(a) for a in inst.at_t[1:]), default=0)
        assert max(deg_s, deg_t) <= 4, "degree bound of the reduction violated"
    return inst

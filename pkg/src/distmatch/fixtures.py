"""Named small instances with known optima and reference matchings.

Each fixture is built here programmatically and also shipped as text files in
``distmatch/data/`` (``<name>.dm`` plus ``<name>.<ref>.m`` per reference
matching).  ``tests/test_fixtures.py`` checks the two agree byte for byte;
``write_fixture_files`` regenerates the files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .core import Edge, InputError, Instance, Mode, Variant
from .gen import ThreeDimMatching, gen_from_3dm
from .io import format_instance, format_matching, parse_instance, parse_matching


@dataclass(frozen=True)
class Fixture:
    name: str
    instance: Instance
    refs: dict[str, frozenset[int]] = field(default_factory=dict)


def _unit(n, k, d, pairs, mode=Mode.MAXIMUM, comments=()):
    edges = tuple(Edge(s, t, Fraction(1)) for s, t in pairs)
    return Instance(n, k, d, edges, Variant.LINE, mode, (), tuple(comments))


def _by_t(adj: dict[int, list[int]]) -> list[tuple[int, int]]:
    return [(s, t) for t, ss in adj.items() for s in ss]


def _fig1() -> Fixture:
    inst = _unit(5, 3, 3, [(3, 1), (4, 1), (1, 2), (3, 2), (4, 2), (2, 3), (5, 3)], Mode.PERFECT,
                 ["fig1: perfect 3-distance matching and an infeasible look-alike"])
    return Fixture("fig1", inst, {
        "feasible": inst.matching([(3, 1), (1, 2), (4, 2), (2, 3), (5, 3)]),
        "infeasible": inst.matching([(4, 1), (1, 2), (3, 2), (2, 3), (5, 3)]),
    })


TDM_EXAMPLE = ThreeDimMatching(3, ((2, 1, 1), (3, 2, 1), (1, 3, 1), (1, 2, 2), (2, 2, 3), (3, 3, 3)))


def _fig2() -> Fixture:
    inst = gen_from_3dm(TDM_EXAMPLE)
    inst = inst.replace(comments=("fig2: 3dm reduction example, has a perfect 9-distance matching",)
                        + inst.comments)
    return Fixture("fig2", inst)


def _fig3a() -> Fixture:
    inst = _unit(3, 2, 2, [(1, 2), (3, 2), (2, 1), (2, 2)],
                 comments=["fig3a: greedy can be 3 times worse than optimal"])
    return Fixture("fig3a", inst, {
        "opt": inst.matching([(1, 2), (2, 1), (3, 2)]),
        "greedy": inst.matching([(2, 2)]),
    })


def _fig3b() -> Fixture:
    inst = _unit(2, 2, 2, [(1, 2), (2, 1), (1, 1)],
                 comments=["fig3b: S-Greedy and T-Greedy can be 2 times worse than optimal"])
    return Fixture("fig3b", inst, {
        "opt": inst.matching([(1, 2), (2, 1)]),
        "greedy": inst.matching([(1, 1)]),
    })


def _fig4() -> Fixture:
    inst = _unit(5, 3, 3, [(1, 1), (2, 2), (3, 3), (4, 1), (5, 2)],
                 comments=["fig4: tight example for the window-partition algorithm"])
    return Fixture("fig4", inst, {
        "opt": frozenset(range(inst.m)),
        "tight": inst.matching([(1, 1), (4, 1), (5, 2)]),
    })


def _fig5() -> Fixture:
    adj = {1: [1, 5, 7], 2: [2, 4, 7], 3: [1, 4, 8], 4: [2, 5, 8]}
    inst = _unit(8, 4, 5, _by_t(adj), comments=["fig5: LP optimum 6, integer optimum 5"])
    return Fixture("fig5", inst, {"opt": inst.matching([(1, 1), (8, 3), (5, 4), (2, 2), (7, 2)])})


def _fig6() -> Fixture:
    inst = _unit(4, 2, 2, [(1, 1), (3, 1), (2, 2), (4, 2), (2, 1), (3, 2)],
                 comments=["fig6: a 2-locally optimal matching of half the optimal size"])
    wavy = inst.matching([(2, 1), (3, 2)])
    return Fixture("fig6", inst, {"wavy": wavy, "opt": frozenset(range(inst.m)) - wavy})


def _fig7() -> Fixture:
    # (s, wavy?) per T-node
    adj = {
        1: [(1, 0), (2, 1), (6, 0)],
        2: [(3, 0), (5, 1), (9, 0)],
        3: [(2, 0), (3, 1), (7, 0), (10, 1), (14, 0)],
        4: [(5, 0), (6, 1), (10, 0)],
        5: [(4, 0), (8, 1), (12, 0), (16, 1), (17, 0)],
        6: [(8, 0), (11, 1), (13, 0), (17, 1), (18, 0)],
        7: [(15, 0)],
        8: [(11, 0), (15, 1), (16, 0)],
    }
    pairs = [(s, t) for t, ss in adj.items() for s, _ in ss]
    inst = _unit(18, 8, 5, pairs, comments=["fig7: a 3-locally optimal 5-distance matching, ratio 9/5"])
    wavy = inst.matching([(s, t) for t, ss in adj.items() for s, w in ss if w])
    return Fixture("fig7", inst, {"wavy": wavy, "opt": frozenset(range(inst.m)) - wavy})


_BUILDERS = {
    "fig1": _fig1,
    "fig2": _fig2,
    "fig3a": _fig3a,
    "fig3b": _fig3b,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _fig6,
    "fig7": _fig7,
}
NAMES = tuple(_BUILDERS)


def build(name: str) -> Fixture:
    """Construct a fixture in memory."""
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise InputError(f"unknown fixture {name!r}; known: {', '.join(NAMES)}") from None


def fixture_files(name: str) -> dict[str, str]:
    """File name -> content for one fixture, as shipped."""
    fx = build(name)
    out = {f"{name}.dm": format_instance(fx.instance)}
    for ref, M in fx.refs.items():
        out[f"{name}.{ref}.m"] = format_matching(fx.instance, M)
    return out


def shipped_dir():
    return resources.files("distmatch") / "data"


def load(name: str) -> Fixture:
    """Read a fixture from the shipped files."""
    if name not in _BUILDERS:
        build(name)  # raises the unknown-name error
    base = shipped_dir()
    inst = parse_instance((base / f"{name}.dm").read_text(encoding="utf-8"))
    refs = {}
    for entry in sorted(base.iterdir(), key=lambda p: p.name):
        parts = entry.name.split(".")
        if len(parts) == 3 and parts[0] == name and parts[2] == "m":
            refs[parts[1]] = parse_matching(entry.read_text(encoding="utf-8"), inst)
    return Fixture(name, inst, refs)


def write_fixture_files(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in NAMES:
        for fname, text in fixture_files(name).items():
            path = directory / fname
            path.write_text(text, encoding="utf-8")
            written.append(path)
    return written

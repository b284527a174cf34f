"""Line-oriented text formats for instances and matchings.

Instance::

    dm 1 <n> <k> <d> <perfect|max> <line|cycle>
    # free comments
    e <s> <t> <weight>          weight is an integer or p/q
    r <s> <count>               optional loop lines

Matching::

    m <s> <t>

Blank lines and ``#`` comments are ignored on input.  Output is canonical:
header, comments, edges sorted by ``(s, t)``, loops sorted by ``s``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .core import Edge, InputError, Instance, Mode, Variant

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(token: str) -> Fraction:
    if not _RATIONAL.match(token):
        raise InputError(f"bad rational {token!r}")
    try:
        return Fraction(token)
    except ZeroDivisionError:
        raise InputError(f"zero denominator in {token!r}") from None


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split("#", 1)[0].split()


def _int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise InputError(f"line {lineno}: expected integer, got {token!r}") from None


def parse_instance(text: str) -> Instance:
    lines = _lines(text)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise InputError("empty instance file") from None
    if len(head) != 7 or head[0] != "dm" or head[1] != "1":
        raise InputError(f"line {lineno}: expected 'dm 1 <n> <k> <d> <mode> <variant>'")
    n, k, d = (_int(x, lineno) for x in head[2:5])
    if head[5] not in ("perfect", "max") or head[6] not in ("line", "cycle"):
        raise InputError(f"line {lineno}: bad mode/variant {head[5]!r} {head[6]!r}")
    comments = tuple(
        raw.strip()[1:].strip() for raw in text.splitlines() if raw.strip().startswith("#")
    )
    edges: list[Edge] = []
    loops: list[tuple[int, int]] = []
    for lineno, tok in lines:
        if tok[0] == "e" and len(tok) == 4:
            edges.append(Edge(_int(tok[1], lineno), _int(tok[2], lineno), parse_rational(tok[3])))
        elif tok[0] == "r" and len(tok) == 3:
            loops.append((_int(tok[1], lineno), _int(tok[2], lineno)))
        else:
            raise InputError(f"line {lineno}: unrecognised line {' '.join(tok)!r}")
    try:
        return Instance(n, k, d, tuple(edges), Variant(head[6]), Mode(head[5]), tuple(loops), comments)
    except InputError as exc:
        raise InputError(f"invalid instance: {exc}") from None


def format_instance(inst: Instance) -> str:
    out = [f"dm 1 {inst.n} {inst.k} {inst.d} {inst.mode.value} {inst.variant.value}"]
    out += [f"# {c}" if c else "#" for c in inst.comments]
    out += [f"e {e.s} {e.t} {format_rational(e.weight)}" for e in inst.edges]
    out += [f"r {s} {c}" for s, c in inst.loops]
    return "\n".join(out) + "\n"


def parse_matching(text: str, inst: Instance) -> frozenset[int]:
    ids = set()
    for lineno, tok in _lines(text):
        if tok[0] != "m" or len(tok) != 3:
            raise InputError(f"line {lineno}: expected 'm <s> <t>'")
        s, t = _int(tok[1], lineno), _int(tok[2], lineno)
        e = inst.find(s, t)
        if e in ids:
            raise InputError(f"line {lineno}: duplicate matching edge s{s}t{t}")
        ids.add(e)
    return frozenset(ids)


def parse_edge_order(text: str, inst: Instance) -> list[int]:
    """An edge order uses the matching syntax; order of lines is kept."""
    order: list[int] = []
    for lineno, tok in _lines(text):
        if tok[0] != "m" or len(tok) != 3:
            raise InputError(f"line {lineno}: expected 'm <s> <t>'")
        e = inst.find(_int(tok[1], lineno), _int(tok[2], lineno))
        if e in order:
            raise InputError(f"line {lineno}: duplicate edge in order")
        order.append(e)
    return order


def format_matching(inst: Instance, M: Iterable[int]) -> str:
    return "".join(f"m {s} {t}\n" for s, t in inst.pairs(M))


def read_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def write_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(format_instance(inst), encoding="utf-8")

"""Command line interface.

Reports go to stdout as ``key: value`` lines with exact ``p/q`` rationals;
diagnostics go to stderr.  Exit codes: 0 ok, 2 input error, 3 infeasible
(or a failed verification), 4 resource guard tripped.

An INSTANCE argument is a file path or a fixture name (``fig5``); a
MATCHING argument is a file path or, for fixtures, a reference name
(``wavy``).
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import fixtures
from .approx import (
    find_improvement,
    greedy,
    greedy_order,
    local_search,
    rho,
    s_greedy,
    t_greedy,
    window_factor,
    window_partition,
)
from .bench import ALGORITHMS, Grid, dump_summary, run_bench
from .core import InputError, Instance, Mode, SizeError, Variant, is_feasible, weight
from .exact import SOLVERS
from .gen import ThreeDimMatching, gen_from_3dm, gen_random, gen_regular, spawn_seeds
from .io import (
    format_instance,
    format_matching,
    format_rational,
    parse_edge_order,
    parse_instance,
    parse_matching,
    parse_rational,
)
from .lp import (
    build_lp,
    canonical_optimal,
    export_lp,
    flat_order,
    flat_theta,
    fractional_decompose,
    integrality_gap,
    lp_value,
    solve_lp_exact,
    wdm_lp_apx_details,
)
from .regular import check_regular, regular_decompose, regular_perfect

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_GUARD = 0, 2, 3, 4


class Infeasible(Exception):
    """Raised to finish a command with exit code 3 after its report."""


class Report:
    def __init__(self):
        self.items: list[tuple[str, str]] = []

    def add(self, key: str, value) -> None:
        if isinstance(value, Fraction):
            value = format_rational(value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        self.items.append((key, str(value)))

    def add_value(self, key: str, value: Fraction | None) -> None:
        if value is None:
            self.add(key, "none")
            return
        self.add(key, value)
        if value.denominator != 1:
            self.add(f"{key}_decimal", f"~{float(value):.6f}")

    def add_matching(self, inst: Instance, M, key: str = "matching") -> None:
        self.add(key, " ".join(inst.label(e) for e in sorted(M)) or "-")

    def render(self) -> str:
        return "".join(f"{k}: {v}\n" for k, v in self.items)


def digest(inst: Instance) -> str:
    return hashlib.sha256(format_instance(inst).encode()).hexdigest()[:16]


def default_seed() -> int:
    raw = os.environ.get("DM_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"DM_SEED must be an integer, got {raw!r}") from None


def load_instance(arg: str) -> tuple[Instance, fixtures.Fixture | None]:
    path = Path(arg)
    if path.is_file():
        return parse_instance(path.read_text(encoding="utf-8")), None
    if arg in fixtures.NAMES:
        fx = fixtures.load(arg)
        return fx.instance, fx
    raise InputError(f"no such instance file or fixture: {arg!r}")


def load_matching(arg: str, inst: Instance, fx: fixtures.Fixture | None) -> frozenset[int]:
    path = Path(arg)
    if path.is_file():
        return parse_matching(path.read_text(encoding="utf-8"), inst)
    if fx is not None and arg in fx.refs:
        return fx.refs[arg]
    known = f" (references: {', '.join(sorted(fx.refs))})" if fx and fx.refs else ""
    raise InputError(f"no such matching file or reference: {arg!r}{known}")


def _header(rep: Report, inst: Instance, algo: str) -> None:
    rep.add("algorithm", algo)
    rep.add("instance", digest(inst))
    rep.add("n", inst.n)
    rep.add("k", inst.k)
    rep.add("d", inst.d)
    rep.add("m", inst.m)
    rep.add("mode", inst.mode.value)
    rep.add("variant", inst.variant.value)


def _save_matching(args, inst: Instance, M) -> None:
    if getattr(args, "save", None):
        Path(args.save).write_text(format_matching(inst, M), encoding="utf-8")


# --------------------------------------------------------------------------
# commands


def cmd_solve(args, rep: Report) -> None:
    inst, _ = load_instance(args.instance)
    _header(rep, inst, args.algo)
    sol = SOLVERS[args.algo](inst)
    if not sol.feasible:
        rep.add("status", "infeasible")
        raise Infeasible
    rep.add("status", "optimal")
    rep.add_value("value", sol.value)
    rep.add("size", len(sol.matching))
    rep.add_matching(inst, sol.matching)
    rep.add("feasible", bool(is_feasible(inst, sol.matching)))
    _save_matching(args, inst, sol.matching)


def cmd_approx(args, rep: Report) -> None:
    inst, fx = load_instance(args.instance)
    algo = args.algo
    name = f"local{args.l}" if algo == "local" else algo
    _header(rep, inst, name)
    cardinality = algo in ("sgreedy", "tgreedy", "local")
    if algo == "greedy":
        order = None
        if args.order == "adversarial":
            order = "adversarial"
        elif args.order:
            order = parse_edge_order(Path(args.order).read_text(encoding="utf-8"), inst)
        if order is not None:
            rep.add("order", " ".join(inst.label(e) for e in greedy_order(inst, order)))
        M = greedy(inst, order)
        guarantee = Fraction(3)
    elif algo == "sgreedy":
        M, guarantee = s_greedy(inst), Fraction(2)
    elif algo == "tgreedy":
        M, guarantee = t_greedy(inst), Fraction(2)
    elif algo == "window":
        M, guarantee = window_partition(inst), window_factor(inst.d)
    else:
        init = load_matching(args.init, inst, fx) if args.init else None
        M, guarantee = local_search(inst, args.l, init), rho(args.l)
    got = Fraction(len(M)) if cardinality else weight(inst, M)
    rep.add("objective", "cardinality" if cardinality else "weight")
    rep.add_value("value", weight(inst, M))
    rep.add("size", len(M))
    rep.add_matching(inst, M)
    rep.add("feasible", bool(is_feasible(inst, M, perfect=False)))
    rep.add_value("guarantee", guarantee)
    if args.certify:
        target = inst.unweighted() if cardinality else inst
        target = target.replace(mode=Mode.MAXIMUM)
        opt = SOLVERS["fpt"](target).value
        rep.add_value("opt", opt)
        if got:
            rep.add_value("ratio", opt / got)
            rep.add("within_guarantee", opt <= guarantee * got)
        else:
            rep.add("ratio", "1" if opt == 0 else "inf")
            rep.add("within_guarantee", opt == 0)
    _save_matching(args, inst, M)


def cmd_lp(args, rep: Report) -> None:
    inst, _ = load_instance(args.instance)
    _header(rep, inst, f"lp-{args.action}")
    if args.export:
        Path(args.export).write_text(export_lp(build_lp(inst)), encoding="utf-8")
    if args.action == "solve":
        sol = solve_lp_exact(build_lp(inst))
        if not sol.feasible:
            rep.add("status", "infeasible")
            raise Infeasible
        rep.add("status", "optimal")
        rep.add_value("lp_value", sol.value)
        rep.add("integral", sol.integral)
        rep.add("pivots", sol.pivots)
        rep.add("x", _format_x(inst, sol.x))
        return
    if inst.mode is Mode.PERFECT:
        inst = inst.replace(mode=Mode.MAXIMUM)
        rep.add("note", "perfect mode relaxed to maximum mode")
    theta = flat_theta(inst.d)
    if args.action == "order":
        sol = canonical_optimal(inst)
        fo = flat_order(inst, sol.x)
        rep.add_value("lp_value", sol.value)
        rep.add("x", _format_x(inst, sol.x))
        rep.add("order", " ".join(inst.label(e) for e in fo.order))
        rep.add_value("flatness", fo.theta)
        rep.add_value("theta", theta)
        rep.add("flat", fo.theta <= theta)
    elif args.action == "round":
        r = wdm_lp_apx_details(inst)
        w = weight(inst, r.matching)
        rep.add_value("value", w)
        rep.add("size", len(r.matching))
        rep.add_matching(inst, r.matching)
        rep.add_value("lp_value", r.lp.value)
        rep.add_value("theta", theta)
        rep.add("certified", theta * w >= r.lp.value)
        _save_matching(args, inst, r.matching)
    elif args.action == "gap":
        lp = lp_value(inst)
        ip = SOLVERS["fpt"](inst).value
        rep.add_value("lp_value", lp)
        rep.add_value("ip_value", ip)
        rep.add_value("gap", integrality_gap(inst))
        rep.add_value("bound", theta)
    else:
        sol = canonical_optimal(inst)
        fo = flat_order(inst, sol.x)
        dec = fractional_decompose(inst, sol.x, fo.order, theta)
        rep.add_value("lp_value", sol.value)
        rep.add("K", dec.K)
        rep.add("q", dec.q)
        rep.add_value("lambda_sum", sum((lam for lam, _ in dec.parts), Fraction(0)))
        best = max((weight(inst, M) for _, M in dec.parts), default=Fraction(0))
        rep.add_value("best_part", best)
        for i, (lam, M) in enumerate(dec.parts, 1):
            rep.add_matching(inst, M, f"part{i}")


def _format_x(inst: Instance, x) -> str:
    return " ".join(f"{inst.label(e)}={format_rational(v)}" for e, v in enumerate(x) if v) or "-"


def cmd_regular(args, rep: Report) -> None:
    inst, _ = load_instance(args.instance)
    _header(rep, inst, f"regular-{args.action}")
    cert = check_regular(inst)
    rep.add("regular", cert.ok)
    rep.add("r", cert.r if cert.ok else "none")
    if not cert.ok:
        rep.add("violation", cert.describe())
        if args.action != "check":
            raise InputError(f"instance is not regular: {cert.describe()}")
        return
    if args.action == "perfect":
        M = regular_perfect(inst)
        rep.add_matching(inst, M)
        _save_matching(args, inst, M)
    elif args.action == "decompose":
        for i, M in enumerate(regular_decompose(inst), 1):
            rep.add_matching(inst, M, f"part{i}")


def cmd_verify(args, rep: Report) -> None:
    inst, fx = load_instance(args.instance)
    M = load_matching(args.matching, inst, fx)
    _header(rep, inst, "verify")
    rep.add_matching(inst, M)
    rep.add_value("value", weight(inst, M))
    rep.add("size", len(M))
    feas = is_feasible(inst, M)
    rep.add("feasible", feas.ok)
    failed = not feas.ok
    if not feas.ok:
        rep.add("violation", feas.describe(inst))
    if args.local is not None:
        if not is_feasible(inst, M, perfect=False):
            rep.add("locally_optimal", "n/a")
        else:
            w = find_improvement(inst, M, args.local)
            rep.add("l", args.local)
            rep.add("locally_optimal", w is None)
            if w is not None:
                failed = True
                rep.add("witness", " ".join(inst.label(e) for e in sorted(w.X)))
                rep.add("hit", " ".join(inst.label(e) for e in sorted(w.hit)) or "-")
    if failed:
        raise Infeasible


def _parse_weights(raw: str):
    if raw == "unit":
        return None
    lo, sep, hi = raw.partition(":")
    if not sep:
        raise InputError("weights must be 'unit' or 'lo:hi'")
    try:
        return (int(lo), int(hi))
    except ValueError:
        raise InputError(f"bad weight range {raw!r}") from None


def cmd_gen(args, rep: Report) -> None:
    seed = args.seed if args.seed is not None else default_seed()
    insts: list[Instance] = []
    if args.kind == "3dm":
        if not args.triples:
            raise InputError("--triples is required for --kind 3dm")
        try:
            triples = tuple(tuple(int(c) for c in t.split(",")) for t in args.triples.split())
        except ValueError:
            raise InputError(f"bad triples {args.triples!r}; expected 'x,y,z x,y,z ...'") from None
        insts.append(gen_from_3dm(ThreeDimMatching(args.q, triples)))
    else:
        for child in spawn_seeds(seed, args.count):
            if args.kind == "random":
                insts.append(gen_random(
                    args.n, args.k, args.d, parse_rational(args.density), _parse_weights(args.weights), child,
                    mode=Mode(args.mode), variant=Variant(args.variant),
                ))
            else:
                insts.append(gen_regular(args.n, args.d, args.r, child))
    rep.add("kind", args.kind)
    rep.add("seed", seed)
    rep.add("count", len(insts))
    if args.out is None:
        if len(insts) != 1:
            raise InputError("--out is required when generating more than one instance")
        sys.stdout.write(format_instance(insts[0]))
        rep.items.clear()
        return
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, inst in enumerate(insts):
        name = f"{args.kind}-{i:04d}.dm"
        (out / name).write_text(format_instance(inst), encoding="utf-8")
        line = f"{name} {digest(inst)} m={inst.m}"
        if args.kind == "regular":
            line += f" regular={check_regular(inst).r}"
        rep.add(f"file{i}", line)


def cmd_bench(args, rep: Report) -> None:
    seed = args.seed if args.seed is not None else default_seed()
    algos = args.algos.split(",")
    unknown = [a for a in algos if a not in ALGORITHMS]
    if unknown:
        raise InputError(f"unknown algorithms {unknown}; known: {', '.join(ALGORITHMS)}")
    grid = Grid(
        _int_list(args.n), _int_list(args.k), _int_list(args.d), args.count,
        parse_rational(args.density), _parse_weights(args.weights),
    )
    result = run_bench(grid, algos, seed, certify=args.certify, timing=args.timing, jobs=args.jobs)
    text = dump_summary(result)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    rep.items.clear()
    if args.out:
        rep.add("summary", args.out)
        for name, agg in result["summary"].items():
            for key, val in agg.items():
                rep.add(f"{name}.{key}", val)


def _int_list(raw: str) -> tuple[int, ...]:
    out: list[int] = []
    for part in raw.split(","):
        lo, sep, hi = part.partition("-")
        try:
            out += list(range(int(lo), int(hi) + 1)) if sep else [int(lo)]
        except ValueError:
            raise InputError(f"bad integer list {raw!r}") from None
    return tuple(out)


def cmd_fixtures(args, rep: Report) -> None:
    if args.write:
        for path in fixtures.write_fixture_files(args.write):
            rep.add("wrote", path)
        return
    if args.check:
        bad = []
        for name in fixtures.NAMES:
            for fname, text in fixtures.fixture_files(name).items():
                shipped = (fixtures.shipped_dir() / fname).read_text(encoding="utf-8")
                if shipped != text:
                    bad.append(fname)
        rep.add("fixtures", len(fixtures.NAMES))
        rep.add("mismatches", " ".join(bad) or "-")
        if bad:
            raise Infeasible
        return
    if args.name is None:
        for name in fixtures.NAMES:
            fx = fixtures.load(name)
            rep.add(name, f"n={fx.instance.n} k={fx.instance.k} d={fx.instance.d} m={fx.instance.m} "
                          f"refs={','.join(sorted(fx.refs)) or '-'}")
        return
    fx = fixtures.load(args.name)
    if args.ref:
        if args.ref not in fx.refs:
            raise InputError(f"fixture {args.name} has no reference {args.ref!r}")
        sys.stdout.write(format_matching(fx.instance, fx.refs[args.ref]))
    else:
        sys.stdout.write(format_instance(fx.instance))


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="distmatch", description="d-distance matching toolkit")
    p.add_argument("--timing", action="store_true", help="include wall time in reports")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="exact optimum")
    s.add_argument("instance")
    s.add_argument("--algo", choices=sorted(SOLVERS), default="fpt")
    s.add_argument("--save", metavar="FILE", help="write the matching to FILE")
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("approx", help="approximation algorithms")
    a.add_argument("instance")
    a.add_argument("--algo", choices=["greedy", "sgreedy", "tgreedy", "window", "local"], default="greedy")
    a.add_argument("--l", type=int, default=2, help="neighbourhood size for local search")
    a.add_argument("--order", metavar="FILE|adversarial", help="greedy scan order")
    a.add_argument("--init", metavar="MATCHING", help="start matching for local search")
    a.add_argument("--certify", action="store_true", help="compare with the exact optimum")
    a.add_argument("--save", metavar="FILE")
    a.set_defaults(func=cmd_approx)

    lp = sub.add_parser("lp", help="LP relaxation tools")
    lp.add_argument("instance")
    lp.add_argument("--action", choices=["solve", "order", "round", "gap", "decompose"], default="solve")
    lp.add_argument("--export", metavar="FILE", help="also write the LP in text form")
    lp.add_argument("--save", metavar="FILE")
    lp.set_defaults(func=cmd_lp)

    r = sub.add_parser("regular", help="regular instances")
    r.add_argument("instance")
    r.add_argument("--action", choices=["check", "perfect", "decompose"], default="check")
    r.add_argument("--save", metavar="FILE")
    r.set_defaults(func=cmd_regular)

    v = sub.add_parser("verify", help="check a matching")
    v.add_argument("instance")
    v.add_argument("matching")
    v.add_argument("--local", type=int, metavar="L", help="also test L-local optimality")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="generate instances")
    g.add_argument("--kind", choices=["random", "regular", "3dm"], default="random")
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--k", type=int, default=4)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--r", type=int, default=2)
    g.add_argument("--density", default="1/2")
    g.add_argument("--weights", default="1:10", help="'unit' or 'lo:hi'")
    g.add_argument("--mode", choices=["max", "perfect"], default="max")
    g.add_argument("--variant", choices=["line", "cycle"], default="line")
    g.add_argument("--q", type=int, default=0, help="elements per side (3dm)")
    g.add_argument("--triples", help="space separated x,y,z triples (3dm)")
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, help="default: $DM_SEED or 0")
    g.add_argument("--out", metavar="DIR")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="run algorithms over a random grid")
    b.add_argument("--algos", default="greedy,sgreedy,window,lpapx")
    b.add_argument("--n", default="8", help="list like 4,6 or range like 1-8")
    b.add_argument("--k", default="4")
    b.add_argument("--d", default="1-3")
    b.add_argument("--count", type=int, default=10, help="instances per grid cell")
    b.add_argument("--density", default="1/2")
    b.add_argument("--weights", default="1:10")
    b.add_argument("--seed", type=int, help="default: $DM_SEED or 0")
    b.add_argument("--certify", action="store_true", help="compute exact optima and ratios")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--out", metavar="FILE")
    b.set_defaults(func=cmd_bench)

    f = sub.add_parser("fixtures", help="list, print or write the bundled fixtures")
    f.add_argument("name", nargs="?", choices=fixtures.NAMES)
    f.add_argument("--ref", help="print a reference matching instead")
    f.add_argument("--write", metavar="DIR")
    f.add_argument("--check", action="store_true", help="compare shipped files with the builders")
    f.set_defaults(func=cmd_fixtures)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    rep = Report()
    code = EXIT_OK
    start = time.perf_counter()
    try:
        args.func(args, rep)
    except Infeasible:
        code = EXIT_INFEASIBLE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SizeError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    if args.timing and rep.items:
        rep.add("seconds", f"{time.perf_counter() - start:.6f}")
    sys.stdout.write(rep.render())
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Benchmark runner: algorithms over a grid of random instances.

The summary is a JSON document with exact ratios as ``p/q`` strings.  It
contains no timings unless asked for, so equal seeds and grids give
byte-identical summaries.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable

from .approx import greedy, local_search, rho, s_greedy, t_greedy, window_factor, window_partition
from .core import Instance, weight
from .exact import solve_constant_t, solve_fpt
from .gen import gen_random, spawn_seeds
from .io import format_rational
from .lp import flat_theta, wdm_lp_apx

# name -> (run, objective is cardinality, guarantee as a function of d)
ALGORITHMS: dict[str, tuple[Callable[[Instance], frozenset], bool, Callable[[int], Fraction]]] = {
    "greedy": (greedy, False, lambda d: Fraction(3)),
    "sgreedy": (s_greedy, True, lambda d: Fraction(2)),
    "tgreedy": (t_greedy, True, lambda d: Fraction(2)),
    "window": (window_partition, False, lambda d: window_factor(d)),
    "lpapx": (wdm_lp_apx, False, lambda d: flat_theta(d)),
    "fpt": (lambda inst: solve_fpt(inst).matching, False, lambda d: Fraction(1)),
    "ct": (lambda inst: solve_constant_t(inst).matching, False, lambda d: Fraction(1)),
}
for _l in range(1, 5):
    ALGORITHMS[f"local{_l}"] = (
        (lambda l: lambda inst: local_search(inst, l))(_l),
        True,
        (lambda l: lambda d: rho(l))(_l),
    )


@dataclass(frozen=True)
class Grid:
    ns: tuple[int, ...]
    ks: tuple[int, ...]
    ds: tuple[int, ...]
    count: int
    density: Fraction = Fraction(1, 2)
    weights: tuple[int, int] | None = (1, 10)

    def cells(self):
        return list(product(self.ns, self.ks, self.ds))


def _ratio(opt: Fraction, got: Fraction) -> Fraction | None:
    if got == 0:
        return Fraction(1) if opt == 0 else None
    return opt / got


def _fmt(x: Fraction | None) -> str:
    return "inf" if x is None else format_rational(x)


def _run_one(job) -> dict:
    idx, (n, k, d), seed, grid, algos, certify, timing = job
    inst = gen_random(n, k, d, grid.density, grid.weights, seed)
    row: dict = {"id": idx, "n": n, "k": k, "d": d, "m": inst.m}
    if certify:
        opt_w = solve_fpt(inst).value
        opt_1 = solve_fpt(inst.unweighted()).value
        row["opt_weight"] = _fmt(opt_w)
        row["opt_card"] = _fmt(opt_1)
    results = {}
    for name in algos:
        run, card, _ = ALGORITHMS[name]
        start = time.perf_counter()
        M = run(inst)
        elapsed = time.perf_counter() - start
        got = Fraction(len(M)) if card else weight(inst, M)
        res = {"objective": _fmt(got), "size": len(M)}
        if certify:
            res["ratio"] = _fmt(_ratio(opt_1 if card else opt_w, got))
        if timing:
            res["seconds"] = round(elapsed, 6)
        results[name] = res
    row["results"] = results
    return row


def run_bench(
    grid: Grid,
    algos: list[str],
    seed: int,
    *,
    certify: bool = False,
    timing: bool = False,
    jobs: int = 1,
) -> dict:
    unknown = [a for a in algos if a not in ALGORITHMS]
    if unknown:
        raise ValueError(f"unknown algorithms: {', '.join(unknown)}")
    cells = grid.cells()
    seeds = spawn_seeds(seed, len(cells) * grid.count)
    work = []
    for c, cell in enumerate(cells):
        for j in range(grid.count):
            idx = c * grid.count + j
            work.append((idx, cell, seeds[idx], grid, algos, certify, timing))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_one, work))
    else:
        rows = [_run_one(w) for w in work]

    summary = {}
    for name in algos:
        agg: dict = {"instances": len(rows)}
        if certify:
            ratios = [r["results"][name]["ratio"] for r in rows]
            finite = [Fraction(x) for x in ratios if x != "inf"]
            worst = "inf" if "inf" in ratios else _fmt(max(finite, default=Fraction(1)))
            agg["worst_ratio"] = worst
            if finite and len(finite) == len(ratios):
                mean = sum(finite) / len(finite)
                agg["mean_ratio"] = _fmt(mean)
                agg["mean_ratio_decimal"] = f"{float(mean):.6f}"
            _, _, guarantee = ALGORITHMS[name]
            over = 0
            for r, x in zip(rows, ratios):
                if x == "inf" or Fraction(x) > guarantee(r["d"]):
                    over += 1
            agg["guarantee_violations"] = over
        if timing:
            agg["seconds"] = round(sum(r["results"][name]["seconds"] for r in rows), 6)
        summary[name] = agg
    return {
        "seed": seed,
        "grid": {
            "n": list(grid.ns),
            "k": list(grid.ks),
            "d": list(grid.ds),
            "count": grid.count,
            "density": format_rational(grid.density),
            "weights": "unit" if grid.weights is None else f"{grid.weights[0]}:{grid.weights[1]}",
        },
        "algorithms": algos,
        "certified": certify,
        "summary": summary,
        "instances": rows,
    }


def dump_summary(result: dict) -> str:
    return json.dumps(result, indent=1, sort_keys=True) + "\n"

"""Exact, approximate and LP-based solvers for d-distance matchings."""

from .core import (
    Edge,
    ExtendedMatching,
    Feasibility,
    InputError,
    Instance,
    Loop,
    Mode,
    SizeError,
    Variant,
    hit_set,
    hit_set_plus,
    hit_set_plus_union,
    hit_set_union,
    is_feasible,
    to_perfect,
    weight,
)
from .exact import Solution, max_weight_bipartite_matching, prune_degrees, solve_bruteforce, solve_constant_t, solve_fpt

__all__ = [
    "Edge",
    "ExtendedMatching",
    "Feasibility",
    "InputError",
    "Instance",
    "Loop",
    "Mode",
    "SizeError",
    "Solution",
    "Variant",
    "hit_set",
    "hit_set_plus",
    "hit_set_plus_union",
    "hit_set_union",
    "is_feasible",
    "max_weight_bipartite_matching",
    "prune_degrees",
    "solve_bruteforce",
    "solve_constant_t",
    "solve_fpt",
    "to_perfect",
    "weight",
]

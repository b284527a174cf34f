import random
from fractions import Fraction

import pytest

from distmatch import fixtures
from distmatch.approx import (
    find_improvement,
    find_improvement_wrt,
    greedy,
    greedy_order,
    is_locally_optimal,
    is_locally_optimal_wrt,
    local_search,
    rho,
    s_greedy,
    t_greedy,
    window_factor,
    window_padding,
    window_partition,
    window_partitions,
)
from distmatch.core import (
    Builder,
    ExtendedMatching,
    InputError,
    Instance,
    Mode,
    SizeError,
    Variant,
    hit_set_plus_union,
    is_feasible,
    weight,
)
from distmatch.exact import solve_fpt
from oracles import enumerate_optimum, pairwise_feasible, random_instance


def _maximal(inst, M):
    b = Builder(inst, M)
    return not any(b.can_add(e) for e in range(inst.m) if e not in M and inst.edges[e].weight >= 0)


# ---- greedy


def test_fig3a_adversarial_greedy():
    fx = fixtures.build("fig3a")
    inst = fx.instance
    assert greedy(inst, "adversarial") == fx.refs["greedy"]
    assert greedy(inst, [inst.find(2, 2)]) == fx.refs["greedy"]
    assert len(greedy(inst)) == 3


def test_distinct_weights_ignore_override():
    inst = Instance(3, 2, 2, ((1, 1, 5), (2, 1, 4), (2, 2, 3), (3, 2, 2), (1, 2, 1)))
    base = greedy(inst)
    rng = random.Random(0)
    for _ in range(10):
        order = list(range(inst.m))
        rng.shuffle(order)
        assert greedy(inst, order) == base


def test_greedy_order_validation():
    inst = fixtures.build("fig3a").instance
    with pytest.raises(InputError):
        greedy_order(inst, [0, 0])
    with pytest.raises(InputError):
        greedy_order(inst, "random")


def test_greedy_skips_negative_edges():
    inst = Instance(2, 1, 1, ((1, 1, -1), (2, 1, 0)))
    assert greedy(inst) == inst.matching([(2, 1)])


def test_greedy_is_maximal_and_bounded():
    rng = random.Random(1)
    for _ in range(150):
        inst = random_instance(rng, 7, 3, 3, mode=Mode.MAXIMUM, variant=rng.choice(list(Variant)))
        for order in (None, "adversarial"):
            M = greedy(inst, order)
            assert is_feasible(inst, M)
            assert _maximal(inst, M)
            assert 3 * weight(inst, M) >= enumerate_optimum(inst)


# ---- S-Greedy / T-Greedy


def test_fig3b():
    fx = fixtures.build("fig3b")
    assert s_greedy(fx.instance) == fx.refs["greedy"]
    assert t_greedy(fx.instance) == fx.refs["greedy"]


def test_identity_matching_d1():
    inst = Instance(4, 4, 1, tuple((i, i, 1) for i in range(1, 5)))
    assert len(s_greedy(inst)) == 4


def test_single_t_node_spacing():
    inst = Instance(7, 1, 3, tuple((s, 1, 1) for s in range(1, 8)))
    assert [s for s, _ in inst.pairs(t_greedy(inst))] == [1, 4, 7]


def test_t_greedy_line_only():
    with pytest.raises(InputError):
        t_greedy(Instance(3, 1, 1, variant=Variant.CYCLE))


def test_s_greedy_equals_t_greedy():
    rng = random.Random(6)
    for _ in range(300):
        inst = random_instance(rng, 10, 4, 4, mode=Mode.MAXIMUM)
        assert s_greedy(inst) == t_greedy(inst)


# ---- window partition


@pytest.mark.parametrize("n,d", [(1, 1), (5, 3), (7, 4), (2, 5), (12, 2)])
def test_window_padding(n, d):
    p = window_padding(n, d)
    assert d - 1 <= p <= 3 * d - 3
    assert (n + p) % (2 * d - 1) == 0


def test_fig4_window_partition():
    fx = fixtures.build("fig4")
    inst = fx.instance
    M = window_partition(inst)
    assert weight(inst, M) == 3
    assert fx.refs["tight"] in window_partitions(inst)
    assert all(weight(inst, c) <= 3 for c in window_partitions(inst))
    assert window_factor(3) == Fraction(5, 3)


def test_window_partition_single_edge():
    inst = Instance(1, 1, 2, ((1, 1, 3),))
    assert window_partition(inst) == {0}


def test_window_partition_bound():
    rng = random.Random(9)
    for _ in range(200):
        inst = random_instance(rng, 8, 3, 4, mode=Mode.MAXIMUM)
        cands = window_partitions(inst)
        assert len(cands) == 2 * inst.d - 1
        for c in cands:
            assert is_feasible(inst, c)
        M = window_partition(inst)
        assert (2 - Fraction(1, inst.d)) * weight(inst, M) >= enumerate_optimum(inst)


# ---- rho


def test_rho_values():
    assert [rho(l) for l in range(1, 6)] == [3, 2, Fraction(9, 5), Fraction(5, 3), Fraction(21, 13)]
    vals = [rho(l) for l in range(1, 40)]
    assert all(a > b > Fraction(3, 2) for a, b in zip(vals, vals[1:]))
    with pytest.raises(InputError):
        rho(0)


# ---- local search


def test_empty_matching_has_singleton_witness():
    inst = fixtures.build("fig5").instance
    w = find_improvement(inst, frozenset(), 1)
    assert len(w.X) == 1 and w.hit == frozenset()


def test_fig6_local_optimality():
    fx = fixtures.build("fig6")
    inst, wavy = fx.instance, fx.refs["wavy"]
    assert is_locally_optimal(inst, wavy, 2)
    assert not is_locally_optimal(inst, wavy, 3)
    M = local_search(inst, 2, wavy)
    assert M == wavy
    assert Fraction(len(fx.refs["opt"]), len(M)) == rho(2)


def test_fig7_local_optimality():
    fx = fixtures.build("fig7")
    inst, wavy = fx.instance, fx.refs["wavy"]
    assert is_locally_optimal(inst, wavy, 3)
    assert local_search(inst, 3, wavy) == wavy
    assert Fraction(len(fx.refs["opt"]), len(wavy)) == rho(3)
    EM, EM_star = ExtendedMatching(wavy), ExtendedMatching(fx.refs["opt"])
    assert is_locally_optimal_wrt(inst, EM, EM_star, 3)
    assert 18 <= rho(3) * 10


def test_limits_and_infeasible_input():
    inst = fixtures.build("fig1").instance
    with pytest.raises(SizeError):
        find_improvement(inst, frozenset(), 6)
    with pytest.raises(InputError):
        find_improvement(inst, frozenset(), 0)
    with pytest.raises(InputError):
        find_improvement(inst, fixtures.build("fig1").refs["infeasible"], 1)


def test_local_search_l1_is_maximal():
    rng = random.Random(10)
    for _ in range(100):
        inst = random_instance(rng, 8, 3, 3, mode=Mode.MAXIMUM, unit=True)
        M = local_search(inst, 1, frozenset())
        assert _maximal(inst, M)


def test_witness_is_valid_and_search_is_exhaustive():
    from itertools import combinations

    rng = random.Random(12)
    for _ in range(120):
        inst = random_instance(rng, 6, 3, 3, mode=Mode.MAXIMUM, unit=True)
        M = greedy(inst, list(rng.sample(range(inst.m), inst.m)))
        outside = [e for e in range(inst.m) if e not in M]
        for l in (1, 2, 3):
            w = find_improvement(inst, M, l)
            brute = None
            for size in range(1, l + 1):
                for X in combinations(outside, size):
                    if not pairwise_feasible(inst, X, perfect=False):
                        continue
                    hit = {f for f in M for e in X if inst.conflict(e, f)}
                    if len(X) > len(hit):
                        brute = X
                        break
                if brute:
                    break
            assert (w is None) == (brute is None)
            if w is not None:
                assert len(w.X) <= l and len(w.X) > len(w.hit)
                assert pairwise_feasible(inst, (M - w.hit) | w.X, perfect=False)


def test_local_search_bounds():
    rng = random.Random(14)
    for _ in range(120):
        inst = random_instance(rng, 8, 3, 4, mode=Mode.MAXIMUM, unit=True)
        opt = solve_fpt(inst).value
        for l in (1, 2, 3, 4):
            M = local_search(inst, l)
            assert is_feasible(inst, M)
            assert rho(l) * len(M) >= opt


def test_wrt_requires_equal_loops():
    inst = fixtures.build("fig6").instance
    with pytest.raises(InputError):
        find_improvement_wrt(inst, ExtendedMatching(frozenset(), ((1, 1),)), ExtendedMatching(frozenset()), 1)


def test_wrt_without_loops_reduces_to_plain_definition():
    rng = random.Random(15)
    for _ in range(80):
        inst = random_instance(rng, 7, 3, 3, mode=Mode.MAXIMUM, unit=True)
        M = greedy(inst)
        star = solve_fpt(inst).matching
        w = find_improvement_wrt(inst, ExtendedMatching(M), ExtendedMatching(star), 2)
        if w is not None:
            assert w.X <= star - M
            assert len(w.X) > len(w.hit)


def test_loops_property():
    """Whenever EM is l-locally optimal with respect to EM*, |EM*| <= rho_l |EM|."""
    rng = random.Random(16)
    checked = 0
    for _ in range(250):
        inst = random_instance(rng, 7, 3, 3, mode=Mode.MAXIMUM, unit=True)
        M = local_search(inst, 1, greedy(inst, rng.sample(range(inst.m), inst.m)))
        star = solve_fpt(inst).matching
        loops = tuple(sorted({s: rng.randint(1, 2) for s in rng.sample(range(1, inst.n + 1), rng.randint(0, min(2, inst.n)))}.items()))
        EM, EM_star = ExtendedMatching(M, loops), ExtendedMatching(star, loops)
        for l in (1, 2, 3):
            if is_locally_optimal_wrt(inst, EM, EM_star, l):
                assert EM_star.size <= rho(l) * EM.size
                checked += 1
        X = sorted(star - M)[:2]
        h = hit_set_plus_union(inst, EM, X)
        assert all(isinstance(x, int) or x.s in dict(loops) for x in h)
    assert checked > 100

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distmatch import fixtures
from distmatch.core import (
    Builder,
    ExtendedMatching,
    InputError,
    Instance,
    Loop,
    Mode,
    Variant,
    hit_set,
    hit_set_plus,
    hit_set_plus_union,
    hit_set_union,
    is_feasible,
    left_window,
    right_window,
    to_perfect,
    weight,
    window,
)
from distmatch.exact import solve_bruteforce
from oracles import conflict_hit_set, enumerate_optimum, pairwise_feasible, random_instance


@st.composite
def instances(draw, n_max=8, k_max=4, d_max=4, variant=None):
    n = draw(st.integers(1, n_max))
    k = draw(st.integers(1, k_max))
    d = draw(st.integers(1, d_max))
    pairs = draw(st.sets(st.tuples(st.integers(1, n), st.integers(1, k)), max_size=n * k))
    ws = draw(st.lists(st.integers(-2, 6), min_size=len(pairs), max_size=len(pairs)))
    var = variant or draw(st.sampled_from([Variant.LINE, Variant.CYCLE]))
    mode = draw(st.sampled_from([Mode.MAXIMUM, Mode.PERFECT]))
    edges = tuple((s, t, w) for (s, t), w in zip(sorted(pairs), ws))
    return Instance(n, k, d, edges, var, mode)


# ---- validation


def test_rejects_duplicate_and_out_of_range_edges():
    with pytest.raises(InputError):
        Instance(2, 2, 1, ((1, 1, 1), (1, 1, 2)))
    with pytest.raises(InputError):
        Instance(2, 2, 1, ((3, 1, 1),))
    with pytest.raises(InputError):
        Instance(2, 2, 0, ())


def test_rejects_float_weights():
    with pytest.raises(InputError):
        Instance(1, 1, 1, ((1, 1, 0.5),))


def test_edges_sorted_by_s_then_t():
    inst = Instance(3, 3, 1, ((3, 1, 1), (1, 2, 1), (1, 1, 1)))
    assert [(e.s, e.t) for e in inst.edges] == [(1, 1), (1, 2), (3, 1)]


# ---- feasibility


def test_fig1_feasible_and_infeasible():
    fx = fixtures.build("fig1")
    inst = fx.instance
    assert is_feasible(inst, fx.refs["feasible"])
    bad = is_feasible(inst, fx.refs["infeasible"])
    assert not bad
    assert bad.reason == "distance"
    assert [inst.label(e) for e in bad.violation] == ["s1t2", "s3t2"]


def test_empty_matching_feasible_in_max_mode():
    inst = fixtures.build("fig5").instance
    assert is_feasible(inst, frozenset())


def test_perfect_mode_reports_uncovered_node():
    inst = Instance(2, 1, 1, ((1, 1, 1),), mode=Mode.PERFECT)
    res = is_feasible(inst, {0})
    assert not res and res.reason == "uncovered" and res.violation == (2,)


def test_invalid_edge_id_is_input_error():
    inst = fixtures.build("fig5").instance
    with pytest.raises(InputError):
        is_feasible(inst, {99})


def test_cycle_distance_wraps():
    inst = Instance(5, 1, 2, ((1, 1, 1), (5, 1, 1)), Variant.CYCLE)
    assert not is_feasible(inst, {0, 1})
    assert is_feasible(inst.replace(variant=Variant.LINE), {0, 1})


@settings(max_examples=150, deadline=None)
@given(instances(), st.randoms(use_true_random=False))
def test_is_feasible_matches_pairwise_check(inst, rnd):
    M = {e for e in range(inst.m) if rnd.random() < 0.4}
    assert bool(is_feasible(inst, M)) == pairwise_feasible(inst, M)


# ---- weight


def test_weight_examples():
    fx = fixtures.build("fig1")
    assert weight(fx.instance, frozenset()) == 0
    assert weight(fx.instance, fx.refs["feasible"]) == 5
    inst = Instance(1, 1, 1, ((1, 1, "3/2"),))
    assert weight(inst, {0}) == Fraction(3, 2)


# ---- hit sets


def test_hit_set_fig6():
    inst = fixtures.build("fig6").instance
    M = inst.matching([(2, 1), (3, 2)])
    assert hit_set(inst, M, inst.find(1, 1)) == inst.matching([(2, 1)])
    assert hit_set(inst, M, inst.find(3, 1)) == inst.matching([(2, 1), (3, 2)])
    X = inst.matching([(1, 1), (2, 2)])
    assert hit_set_union(inst, M, X) == inst.matching([(2, 1), (3, 2)])
    assert hit_set_union(inst, M, ()) == frozenset()
    e = inst.find(4, 2)
    assert hit_set_union(inst, M, [e]) == hit_set(inst, M, e)


def test_hit_set_of_member_is_input_error():
    inst = fixtures.build("fig6").instance
    with pytest.raises(InputError):
        hit_set(inst, {0}, 0)


def test_hit_set_empty_matching():
    inst = fixtures.build("fig6").instance
    assert all(hit_set(inst, frozenset(), e) == frozenset() for e in range(inst.m))


def _random_feasible(inst, rng):
    b = Builder(inst)
    ids = list(range(inst.m))
    rng.shuffle(ids)
    for e in ids:
        if rng.random() < 0.6 and b.can_add(e):
            b.add(e)
    return b.matching


def test_hit_set_minimal_by_exhaustion():
    rng = random.Random(11)
    checked = 0
    for _ in range(200):
        inst = random_instance(rng, 8, 4, 4, mode=Mode.MAXIMUM, variant=rng.choice(list(Variant)))
        M = _random_feasible(inst, rng)
        for e in range(inst.m):
            if e in M:
                continue
            H = hit_set(inst, M, e)
            assert H == conflict_hit_set(inst, M, e)
            assert pairwise_feasible(inst, (M - H) | {e}, perfect=False)
            for h in H:
                assert not pairwise_feasible(inst, (M - (H - {h})) | {e}, perfect=False)
            checked += 1
    assert checked > 100


def test_hit_set_union_is_union_of_singletons():
    rng = random.Random(5)
    for _ in range(100):
        inst = random_instance(rng, 8, 4, 4, mode=Mode.MAXIMUM)
        M = _random_feasible(inst, rng)
        X = [e for e in range(inst.m) if e not in M and rng.random() < 0.5]
        expect = frozenset().union(*(hit_set(inst, M, e) for e in X)) if X else frozenset()
        assert hit_set_union(inst, M, X) == expect


def test_hit_set_plus_with_loops():
    inst = Instance(2, 1, 2, ((1, 1, 1), (2, 1, 1)))
    EM = ExtendedMatching(inst.matching([(2, 1)]), ((1, 2),))
    H = hit_set_plus(inst, EM, inst.find(1, 1))
    assert H == {inst.find(2, 1), Loop(1, 0), Loop(1, 1)}
    assert len(H) == 3
    assert hit_set_plus(inst, EM, Loop(1, 0)) == {Loop(1, 0)}
    assert EM.size == 3


def test_hit_set_plus_without_loops_is_hit_set():
    inst = fixtures.build("fig6").instance
    M = inst.matching([(2, 1), (3, 2)])
    EM = ExtendedMatching(M)
    for e in range(inst.m):
        if e not in M:
            assert hit_set_plus(inst, EM, e) == hit_set(inst, M, e)
    X = [e for e in range(inst.m) if e not in M]
    assert hit_set_plus_union(inst, EM, X) == hit_set_union(inst, M, X)


# ---- windows


@pytest.mark.parametrize("n,d", [(1, 1), (5, 3), (7, 2), (4, 6), (9, 4)])
def test_window_sizes_line(n, d):
    inst = Instance(n, 1, d)
    for i in range(1, n + 1):
        w = window(inst, i)
        assert len(w.left) == min(d, i)
        assert len(w.right) == min(d, n - i + 1)
        assert w.left[-1] == i and w.right[0] == i


@pytest.mark.parametrize("n,d", [(5, 3), (7, 2), (9, 4), (4, 4)])
def test_window_sizes_cycle(n, d):
    inst = Instance(n, 1, d, variant=Variant.CYCLE)
    for i in range(1, n + 1):
        assert len(left_window(inst, i)) == d
        assert len(right_window(inst, i)) == d


# ---- to_perfect


def test_to_perfect_fig3a():
    inst = fixtures.build("fig3a").instance
    out = to_perfect(inst)
    assert out.k == 5 and out.m == 7 and out.mode is Mode.PERFECT
    assert solve_bruteforce(out).value == solve_bruteforce(inst).value == 3


def test_to_perfect_trivial():
    out = to_perfect(Instance(1, 0, 1))
    assert out.k == 1 and out.m == 1
    assert solve_bruteforce(out).value == 0


def test_to_perfect_rejects_perfect_mode():
    with pytest.raises(InputError):
        to_perfect(Instance(1, 1, 1, mode=Mode.PERFECT))


def test_to_perfect_preserves_optimum():
    rng = random.Random(3)
    for _ in range(150):
        inst = random_instance(rng, 6, 3, 3, mode=Mode.MAXIMUM, negative=True,
                               variant=rng.choice(list(Variant)))
        assert enumerate_optimum(to_perfect(inst)) == enumerate_optimum(inst)

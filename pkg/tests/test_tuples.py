import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbwalk.catalog import build_group
from bbwalk.groups import CapExceededError, cyclic, dihedral4, elementary_abelian_2, symmetric3
from bbwalk.markov import coupling_bound
from bbwalk.tuples import (
    all_tuples,
    apply_move,
    build_tree,
    compute_p,
    coupled_step,
    coupling_time,
    estimate_coupling_time,
    exact_coupling_times,
    hamming,
    randomized_commutativity_test,
    sample_gu_not_in_K,
    sample_noncommuting_pair,
    tester_queries_per_trial,
    transition_support,
    tuple_products,
    walk_step,
)


def _naive_product(group, gens, u):
    acc = gens[u[0]]
    for i in u[1:]:
        acc = group.mul(acc, gens[i])
    return acc


def test_compute_p_values():
    assert compute_p(4, 2) == Fraction(1, 3)
    assert compute_p(6, 3) == Fraction(2, 5)
    for k in range(2, 9):
        assert compute_p(k, 1) == Fraction(k - 2, k)
    for l in range(1, 8):
        assert compute_p(2 * l, l) == Fraction(l - 1, 2 * l - 1)
    with pytest.raises(ValueError):
        compute_p(4, 5)


@pytest.mark.parametrize("k, l", [(4, 1), (4, 2), (5, 3), (6, 4)])
def test_compute_p_matches_enumeration(k, l):
    # fraction of tuples that contain both or neither of two fixed indices
    tuples = all_tuples(k, l)
    hits = sum((0 in u) == (1 in u) for u in tuples)
    assert compute_p(k, l) == Fraction(hits, len(tuples))


def test_tree_shapes_and_costs():
    g, gens = build_group("D4x")
    before = g.queries
    t = build_tree((2,), gens, g)
    assert g.queries == before and t.root == gens[2]
    before = g.queries
    t = build_tree((1, 2, 3, 0), gens, g)
    assert g.queries - before == 3 and len(t.internal_nodes()) == 3
    assert build_tree((1, 2, 3), gens, g).shape() == ((0, 1), 2)


@pytest.mark.parametrize("l", range(1, 12))
def test_tree_is_balanced_with_deep_leaves_left(l):
    g, _ = cyclic(16)
    gens = g.elements()
    t = build_tree(tuple(range(l)), gens, g)
    leaf_depths = [t.depth[n] for n in t.leaves]
    assert t.height == (math.ceil(math.log2(l)) if l > 1 else 0)
    assert leaf_depths == sorted(leaf_depths, reverse=True)
    assert t.root == g.element(sum(range(l)) % 16)


def test_walk_step_costs():
    g, gens = build_group("D4x")
    k = len(gens)
    rng = np.random.default_rng(7)
    u = (0, 1)
    t = build_tree(u, gens, g)
    seen = set()
    for _ in range(300):
        before = g.queries
        new, t = walk_step(u, t, rng, k)
        cost = g.queries - before
        changed = [p for p in range(2) if new[p] != u[p]]
        if not changed:
            assert cost == 0
        else:
            ancestors = {a for p in changed for a in t.ancestors(p)}
            assert cost == 2 * len(ancestors)
        seen.add(cost)
        u = new
        assert t.root == _naive_product(g, gens, u)
    assert seen == {0, 2}


@pytest.mark.parametrize("l", [2, 3, 4, 5])
def test_update_cost_bound(l):
    g, _ = cyclic(16)
    gens = g.elements()
    rng = np.random.default_rng(l)
    u = tuple(range(l))
    t = build_tree(u, gens, g)
    worst = 0
    for _ in range(500):
        before = g.queries
        u, t = walk_step(u, t, rng, 16)
        worst = max(worst, g.queries - before)
        assert t.root == g.element(sum(u) % 16)
    assert worst <= 4 * math.ceil(math.log2(l))


def test_apply_move_cases():
    assert apply_move((0, 1), None) == ((0, 1), [])
    assert apply_move((0, 1), (0, 0)) == ((0, 1), [])
    assert apply_move((0, 1), (0, 1)) == ((1, 0), [0, 1])
    assert apply_move((0, 1), (1, 3)) == ((0, 3), [1])


def test_transition_support_examples():
    assert transition_support((0,), 2) == [((0,), Fraction(3, 4)), ((1,), Fraction(1, 4))]
    support = dict(transition_support((0, 1), 4))
    assert support[(1, 0)] == Fraction(1, 8)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.data())
def test_transition_support_is_a_distribution(k, data):
    l = data.draw(st.integers(1, k))
    u = data.draw(st.permutations(range(k)))[:l]
    support = transition_support(u, k)
    assert sum(p for _, p in support) == 1
    assert all(len(set(v)) == l for v, _ in support)


def test_tuple_products_match_naive_and_cap():
    g, gens = build_group("S3x")
    products = tuple_products(g, gens, 3)
    assert len(products) == 24
    for u, val in products.items():
        assert val == _naive_product(g, gens, u)
    with pytest.raises(CapExceededError):
        tuple_products(g, gens, 3, cap=10)


def test_gu_not_in_K_examples():
    g, gens = symmetric3()
    a3 = {x for x in g.elements() if g.mul(g.mul(x, x), x) == gens[0]}
    assert len(a3) == 3
    prob = sample_gu_not_in_K(g, gens, a3, 2)
    assert prob == Fraction(2, 3)
    assert prob >= (1 - compute_p(3, 2)) / 2
    # l = 1 and K trivial: fraction of non-identity generators
    for name in ["Z4", "S3", "D4", "Q8"]:
        g, gens = build_group(name)
        assert sample_gu_not_in_K(g, gens, {gens[0]}, 1) == Fraction(len(gens) - 1, len(gens))


def test_gu_sampled_close_to_exact():
    g, gens = build_group("D4x")
    K = {gens[0], g.mul(gens[1], gens[1])}
    exact = sample_gu_not_in_K(g, gens, K, 2)
    est = sample_gu_not_in_K(g, gens, K, 2, mode="sampled", samples=4000, seed=1)
    assert abs(est - float(exact)) < 4 * math.sqrt(0.25 / 4000)


def test_noncommuting_pair_examples():
    g, gens = elementary_abelian_2(3)
    assert sample_noncommuting_pair(g, gens, 2) == 0
    g, gens = symmetric3()
    prob = sample_noncommuting_pair(g, gens, 2)
    assert prob >= Fraction(1, 9)
    # brute force over all 36 ordered pairs
    tuples = all_tuples(3, 2)
    bad = 0
    for u, v in itertools.product(tuples, repeat=2):
        a, b = _naive_product(g, gens, u), _naive_product(g, gens, v)
        bad += g.mul(a, b) != g.mul(b, a)
    assert prob == Fraction(bad, 36)
    g, gens = dihedral4()
    pairs = list(itertools.product(gens, repeat=2))
    expected = Fraction(sum(g.mul(a, b) != g.mul(b, a) for a, b in pairs), 9)
    assert sample_noncommuting_pair(g, gens, 1) == expected


def test_randomized_tester():
    g, gens = elementary_abelian_2(3)
    for seed in range(5):
        assert randomized_commutativity_test(g, gens, 10, seed)
    g, gens = symmetric3()
    assert (1 - Fraction(1, 9)) ** 64 < Fraction(1, 1000)
    before = g.queries
    assert not randomized_commutativity_test(g, gens, 64, seed=0)
    assert g.queries - before == 64 * tester_queries_per_trial(3)


@pytest.mark.parametrize("name", ["Z2^3", "S3x", "D4x", "Q8x"])
def test_tester_query_count(name):
    g, gens = build_group(name)
    before = g.queries
    randomized_commutativity_test(g, gens, 17, seed=3)
    assert g.queries - before == 17 * (4 * (len(gens) // 2 - 1) + 2)


def test_coupled_step_equal_inputs_stay_equal():
    rng = np.random.default_rng(0)
    pair = ((0, 1), (0, 1))
    for _ in range(200):
        pair, _ = coupled_step(pair, 4, rng)
        assert pair[0] == pair[1]


def test_coupling_never_increases_distance_exhaustive():
    draws = [None] + [(i, j) for i in range(2) for j in range(4)]
    for u, v in itertools.product(all_tuples(4, 2), repeat=2):
        for mv in draws:
            assert hamming(apply_move(u, mv)[0], apply_move(v, mv)[0]) <= hamming(u, v)


@pytest.mark.parametrize("k, l", [(4, 2), (6, 3), (8, 4)])
def test_distance_decrease_probability(k, l):
    # given a non-lazy draw, a distance-d pair gets closer with prob >= d/(2l)
    draws = [(i, j) for i in range(l) for j in range(k)]
    rng = np.random.default_rng(k)
    for _ in range(40):
        u = tuple(rng.permutation(k)[:l].tolist())
        v = tuple(rng.permutation(k)[:l].tolist())
        d = hamming(u, v)
        if d == 0:
            continue
        closer = sum(hamming(apply_move(u, m)[0], apply_move(v, m)[0]) < d for m in draws)
        assert Fraction(closer, len(draws)) >= Fraction(d, 2 * l)


def test_coupling_time_identical_start():
    assert coupling_time((0, 1), (0, 1), 4, np.random.default_rng(0)) == 0


@pytest.mark.parametrize("k, l", [(4, 2), (5, 2), (6, 2)])
def test_coupling_estimate_matches_exact(k, l):
    exact = exact_coupling_times(k, l)
    start = (tuple(range(l)), tuple(range(l, 2 * l)))
    assert max(exact.values()) == pytest.approx(exact[start])
    est = estimate_coupling_time(k, l, 4000, seed=2)
    assert abs(est.mean - exact[start]) < 4 * est.stderr
    assert est.mean <= coupling_bound(l) + 3 * est.stderr


def test_coupling_lazy_count_doubles():
    active = exact_coupling_times(4, 2)
    lazy = exact_coupling_times(4, 2, count_lazy=True)
    assert all(lazy[p] == pytest.approx(2 * active[p]) for p in active)
    est = estimate_coupling_time(4, 2, 4000, seed=5, count_lazy=True)
    start = ((0, 1), (2, 3))
    assert abs(est.mean - lazy[start]) < 4 * est.stderr


def test_coupling_time_grows_with_l():
    small = estimate_coupling_time(8, 2, 2000, seed=0)
    big = estimate_coupling_time(8, 4, 2000, seed=0)
    assert big.mean > small.mean


def test_coupling_estimate_is_deterministic():
    assert estimate_coupling_time(6, 3, 300, seed=9) == estimate_coupling_time(6, 3, 300, seed=9)

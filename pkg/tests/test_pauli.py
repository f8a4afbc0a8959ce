import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbwalk.pauli import (
    MATRICES,
    FunctionOracle,
    MalformedEncodingError,
    PauliReducedGroup,
    PauliWord,
    commutes,
    exact_usc_solver,
    make_generator,
    pauli_block_mul,
    reduced_group_op,
    uc_to_usc,
    usc_instance,
)

SIGNED = [(s, c) for s in (1, -1) for c in "IXYZ"]


def _dense(s, c):
    return s * MATRICES[c]


@pytest.mark.parametrize("a, b", list(itertools.product(SIGNED, repeat=2)))
def test_block_product_matches_matrices(a, b):
    assert np.array_equal(_dense(*pauli_block_mul(a, b)), _dense(*a) @ _dense(*b))


def test_named_block_products():
    assert pauli_block_mul((1, "X"), (1, "Z")) == (1, "Y")
    assert pauli_block_mul((1, "Z"), (1, "X")) == (-1, "Y")
    for s, w in SIGNED:
        assert pauli_block_mul((1, "I"), (s, w)) == (s, w)


def test_y_is_xz():
    assert np.array_equal(MATRICES["Y"], MATRICES["X"] @ MATRICES["Z"])


def test_make_generator_a_and_b_types():
    F = FunctionOracle([1, 0, 1, 3])
    g = make_generator(0, F)
    assert g.letters == "YIIIIZII" and all(s == 1 for s in g.signs)
    g = make_generator(2, F)
    assert g.letters == "IIYIIXII"
    assert F.f_queries == 2
    with pytest.raises(IndexError):
        make_generator(4, F)


def test_k2_identity_function_generators_commute():
    F = FunctionOracle([0, 1])
    a, b = make_generator(0, F), make_generator(1, F)
    assert a.letters == "YIZI" and b.letters == "IYIX"
    assert a * b == b * a


def test_square_of_generator_costs_four_queries():
    F = FunctionOracle([3, 1, 0, 2])
    out = reduced_group_op(0, 0, F)
    assert F.f_queries == 4
    assert out.letters == "I" * 8
    assert out.signs == (-1,) + (1,) * 7


def test_identity_times_generator_is_reencoded():
    F = FunctionOracle([3, 1, 0, 2])
    e = PauliWord.identity(4)
    assert reduced_group_op(e, 2, F) == 2
    assert F.f_queries == 4


def test_explicit_words_cost_at_most_two():
    F = FunctionOracle([3, 1, 0, 2])
    x = PauliWord((1,) * 8, "XXIIIIII")
    y = PauliWord((-1,) + (1,) * 7, "ZIIIIIIZ")
    before = F.f_queries
    out = reduced_group_op(x, y, F)
    assert F.f_queries - before <= 2
    assert np.array_equal(out.dense(), x.dense() @ y.dense())


def test_malformed_encodings():
    F = FunctionOracle([0, 1])
    with pytest.raises(MalformedEncodingError):
        reduced_group_op(5, 0, F)
    with pytest.raises(MalformedEncodingError):
        reduced_group_op(PauliWord((1,), "X"), 0, F)
    with pytest.raises(MalformedEncodingError):
        reduced_group_op(PauliWord((1, 2, 1, 1), "XIII"), 0, F)


def test_commutes_cases():
    perm = FunctionOracle([2, 0, 3, 1])
    assert all(commutes(i, j, perm) for i, j in itertools.combinations(range(4), 2))
    split = FunctionOracle([3, 1, 2, 1])  # F(1) = F(3): one lower, one upper
    assert not commutes(1, 3, split)
    same_side = FunctionOracle([1, 1, 0, 2])
    assert commutes(0, 1, same_side)


def test_usc_instances():
    for seed in range(10):
        F = usc_instance(2, "permutation", seed)
        assert sorted(F.values) == [0, 1]
        F = usc_instance(2, "split-collision", seed)
        assert F.values[0] == F.values[1]
        F = usc_instance(6, "split-collision", seed)
        pairs = [(x, y) for x, y in itertools.combinations(range(6), 2) if F.values[x] == F.values[y]]
        assert len(pairs) == 1 and pairs[0][0] < 3 <= pairs[0][1]
    with pytest.raises(ValueError):
        usc_instance(3, "permutation", 0)
    with pytest.raises(ValueError):
        usc_instance(4, "other", 0)


def test_usc_instance_deterministic():
    assert usc_instance(8, "split-collision", 5).values == usc_instance(8, "split-collision", 5).values


def test_function_oracle_json_roundtrip():
    F = FunctionOracle([1, 0, 3, 3])
    G = FunctionOracle.from_json(F.to_json())
    assert G.values == F.values
    with pytest.raises(ValueError):
        FunctionOracle.from_json('{"k": 4, "values": [0, 1]}')
    with pytest.raises(ValueError):
        FunctionOracle([0, 5])


def test_uc_reduction():
    for seed in range(20):
        perm = FunctionOracle(np.random.default_rng(seed).permutation(8).tolist())
        assert not uc_to_usc(perm, exact_usc_solver, seed)
    F = FunctionOracle([0, 1, 2, 3, 4, 5, 6, 0])
    assert uc_to_usc(F, exact_usc_solver, 3) == uc_to_usc(F, exact_usc_solver, 3)


def test_uc_reduction_acceptance_rate():
    # a single composed run places the pair on opposite halves with prob k/(2(k-1)),
    # so two runs accept with prob >= 3/4
    F = FunctionOracle([0, 1, 2, 3, 4, 5, 6, 0])
    hits = sum(uc_to_usc(F, exact_usc_solver, seed) for seed in range(400))
    p_one = 8 / (2 * 7)
    expected = 1 - (1 - p_one) ** 2
    assert expected >= 0.75
    assert abs(hits / 400 - expected) < 4 * np.sqrt(expected * (1 - expected) / 400)


@pytest.mark.parametrize("k", [2, 4, 6])
def test_exhaustive_commutation_structure(k):
    # every function on a small domain: non-commuting generator pairs
    # are exactly the lower/upper collisions
    for values in itertools.product(range(k), repeat=k) if k <= 4 else \
            (usc_instance(k, kind, s).values for kind in ("permutation", "split-collision") for s in range(40)):
        F = FunctionOracle(values)
        bad = [(i, j) for i, j in itertools.combinations(range(k), 2) if not commutes(i, j, F)]
        assert bad == F.split_collisions()


@pytest.mark.parametrize("k", [2, 4])
def test_group_ops_match_dense_matrices(k):
    rng = np.random.default_rng(k)
    for _ in range(20):
        F = FunctionOracle(rng.integers(k, size=k).tolist())
        gens = [make_generator(i, F).dense() for i in range(k)]
        for x, y in itertools.product(range(k), repeat=2):
            for inverse in (False, True):
                out = reduced_group_op(x, y, F, inverse)
                word = make_generator(out, F) if isinstance(out, int) else out
                gx = np.linalg.inv(gens[x]).round().astype(int) if inverse else gens[x]
                assert np.array_equal(word.dense(), gx @ gens[y])


words = st.builds(
    lambda signs, letters: PauliWord(tuple(signs), "".join(letters)),
    st.lists(st.sampled_from([1, -1]), min_size=8, max_size=8),
    st.lists(st.sampled_from("IXYZ"), min_size=8, max_size=8),
)
encodings = st.one_of(st.integers(0, 3), words)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=4, max_size=4), encodings, encodings, st.booleans())
def test_group_op_properties(values, x, y, inverse):
    F = FunctionOracle(values)
    before = F.f_queries
    out = reduced_group_op(x, y, F, inverse)
    assert F.f_queries - before <= 4

    def dense(e):
        return (make_generator(e, FunctionOracle(values)) if isinstance(e, int) else e).dense()

    lhs = np.linalg.inv(dense(x)).round().astype(int) if inverse else dense(x)
    assert np.array_equal(dense(out), lhs @ dense(y))


@settings(max_examples=50, deadline=None)
@given(words, words, words)
def test_pauli_words_form_a_group(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a.inverse() * a == PauliWord.identity(4)
    assert np.array_equal((a * b).dense(), a.dense() @ b.dense())


def test_reduced_group_tracks_max_queries():
    G = PauliReducedGroup(FunctionOracle([1, 0, 1, 3]))
    gens = G.generators()
    assert gens[0] == G.identity and list(gens[1:]) == [0, 1, 2, 3]
    G.mul(G.mul(0, 1), 2)
    G.inv_mul(3, 3)
    assert G.queries == 3 and G.max_f_per_op <= 4 and G.f_queries > 0

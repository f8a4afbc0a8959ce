import math
from fractions import Fraction

import numpy as np
import pytest

from bbwalk.groups import CapExceededError
from bbwalk.markov import (
    ChainMatrix,
    NotLazyError,
    coupling_bound,
    enumerate_chain,
    gap_lower_bound,
    harmonic,
    lazy_complete_chain,
    mixing_curve,
    product_chain,
    sparse_product_gap,
    spectral_gap,
    verify_gap_from_coupling,
)
from bbwalk.tuples import exact_coupling_times

PAIRS = [(4, 2), (5, 2), (6, 2), (6, 3)]


def test_two_state_chain():
    chain = enumerate_chain(2, 1)
    assert chain.exact == [{0: Fraction(3, 4), 1: Fraction(1, 4)}, {0: Fraction(1, 4), 1: Fraction(3, 4)}]
    rep = spectral_gap(chain)
    assert rep.lambda2 == pytest.approx(0.5) and rep.gap == pytest.approx(0.5)


def test_k4_l2_chain_structure():
    chain = enumerate_chain(4, 2)
    assert chain.size == 12
    assert chain.is_exactly_symmetric()
    assert all(s == 1 for s in chain.exact_row_sums())
    assert np.allclose(chain.P.sum(axis=0), 1)


def test_full_length_tuples_only_swap():
    chain = enumerate_chain(3, 3)
    assert chain.size == 6
    for a, row in enumerate(chain.exact):
        for b in row:
            assert sorted(chain.states[a]) == sorted(chain.states[b])


def test_complete_chain_gap():
    assert spectral_gap(lazy_complete_chain(4)).gap == pytest.approx(2 / 3)
    for m in (2, 3, 8):
        # eigenvalues of J give lambda_2 = 1/2 - 1/(2(m-1))
        assert spectral_gap(lazy_complete_chain(m)).gap == pytest.approx(0.5 + 0.5 / (m - 1))


def test_nonsymmetric_rejected():
    with pytest.raises(ValueError):
        spectral_gap(np.array([[0.5, 0.5], [0.2, 0.8]]))


@pytest.mark.parametrize("k, l", PAIRS)
def test_gap_bounds(k, l):
    chain = enumerate_chain(k, l)
    rep = spectral_gap(chain)
    assert chain.is_exactly_symmetric() and chain.is_irreducible()
    assert rep.gap >= gap_lower_bound(l)
    assert rep.gap >= gap_lower_bound(l, math.log2)
    assert rep.min_eigenvalue >= -1e-9


@pytest.mark.parametrize("k, l", [(4, 2), (5, 2), (6, 2)])
def test_product_gap_equals_gap(k, l):
    chain = enumerate_chain(k, l)
    prod = product_chain(chain)
    assert prod.size == chain.size ** 2
    assert prod.is_exactly_symmetric()
    assert abs(spectral_gap(prod).gap - spectral_gap(chain).gap) <= 1e-9
    assert abs(sparse_product_gap(chain) - spectral_gap(chain).gap) <= 1e-9


def test_product_gap_sparse_large():
    chain = enumerate_chain(6, 3)
    assert abs(sparse_product_gap(chain) - spectral_gap(chain).gap) <= 1e-9
    with pytest.raises(CapExceededError):
        product_chain(chain)


def test_product_stationary_is_uniform():
    prod = product_chain(enumerate_chain(4, 2))
    assert prod.size == 144
    pi = np.full(144, 1 / 144)
    assert np.allclose(pi @ prod.P, pi)


def test_chain_cap(monkeypatch):
    with pytest.raises(CapExceededError):
        enumerate_chain(8, 5, cap=1000)
    monkeypatch.setenv("BBWALK_CAP", "5")
    with pytest.raises(CapExceededError):
        enumerate_chain(4, 2)


def test_mixing_curve_properties():
    chain = enumerate_chain(4, 2)
    curve = mixing_curve(chain, 60)
    assert curve.delta[0] == pytest.approx(1 - 1 / 12)
    assert all(b <= a + 1e-12 for a, b in zip(curve.delta, curve.delta[1:]))
    tau = curve.mixing_time()
    assert tau is not None
    for t, d in enumerate(curve.delta):
        assert d <= 2 * math.exp(-(t // tau)) + 1e-12


def test_corollary_check():
    chain = enumerate_chain(2, 1)
    assert 1 / (4 * math.e * 2) < 0.5
    assert verify_gap_from_coupling(chain, 2)
    assert verify_gap_from_coupling(chain, 1e9)
    with pytest.raises(NotLazyError):
        verify_gap_from_coupling(ChainMatrix([0, 1], np.array([[0.0, 1.0], [1.0, 0.0]])), 2)


@pytest.mark.parametrize("k, l", [(4, 2), (5, 2), (6, 2)])
def test_gap_from_exact_coupling(k, l):
    T = max(exact_coupling_times(k, l, count_lazy=True).values())
    assert verify_gap_from_coupling(enumerate_chain(k, l), T)


def test_bound_helpers():
    for l in range(1, 30):
        assert coupling_bound(l) >= 2 * l * harmonic(l)
    with pytest.raises(ValueError):
        gap_lower_bound(1)
    assert gap_lower_bound(2) == pytest.approx(1 / (8 * math.e * 2 * math.log(2)))

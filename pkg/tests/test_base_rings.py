import random

from hypothesis import given, strategies as st

from milnor_syntomic.base_rings import (AElem, BElem, LaurentElem, frobenius, ideal_J_generators,
                                        ideal_Jtilde_generators, project_to_A, random_belem)
from milnor_syntomic.params import TruncationParams

P = TruncationParams()
seeds = st.integers(0, 10**6)


def small(seed, n_terms=3):
    return random_belem(P, random.Random(seed), n_terms, max_x=6, max_t=4)


def test_frobenius_on_generators():
    X, T = BElem.X(P), BElem.T(P, 0)
    assert frobenius(X) == BElem.monomial(P, 1, xdeg=5)
    assert frobenius(T) == BElem.T(P, 0, 5)
    assert frobenius(BElem.constant(P, 7)) == BElem.constant(P, 7)


@given(seeds, seeds)
def test_frobenius_is_a_ring_map(s1, s2):
    a, b = small(s1), small(s2)
    assert frobenius(a + b) == frobenius(a) + frobenius(b)
    assert frobenius(a * b) == frobenius(a) * frobenius(b)


@given(seeds)
def test_frobenius_is_pth_power_mod_p(seed):
    a = small(seed, 2).with_prec(1)
    assert frobenius(a) == a**5


def test_pi_to_the_e_is_p():
    pi = AElem.pi(P)
    assert pi**2 == AElem.constant(P, 5)
    assert (pi**3).pi_valuation() == 3
    assert AElem.constant(P, 25).pi_valuation() == 4


def test_projection_kills_J():
    for g in ideal_J_generators(P):
        assert project_to_A(g).is_zero()
    # J~ = J + pB maps into pA
    for g in ideal_Jtilde_generators(P):
        img = project_to_A(g)
        assert img.is_zero() or img.pi_valuation() >= P.e


@given(seeds, seeds)
def test_projection_is_a_ring_map(s1, s2):
    a, b = small(s1), small(s2)
    assert project_to_A(a * b) == project_to_A(a) * project_to_A(b)


def test_truncation_and_laurent_view():
    big = BElem.monomial(P, 1, xdeg=P.x_trunc)
    assert big.is_zero()
    x = BElem(P, 3, {(0, (2,)): 4, (3, (-1,)): 1})
    coeffs = x.x_coefficients()
    assert set(coeffs) == {0, 3}
    assert coeffs[0] == LaurentElem(P, 3, {(0, (2,)): 4})
    assert BElem.constant(P, 125).is_zero()  # p^N = 0

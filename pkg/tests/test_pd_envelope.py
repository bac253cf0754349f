import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from milnor_syntomic.base_rings import BElem, random_belem
from milnor_syntomic.params import TruncationParams
from milnor_syntomic.pd_envelope import (InexactDivision, PDElem, PDForm, PDIdealSpec, divided_frobenius,
                                         divided_p_power, frobenius_D, ideal_generators, in_ideal_level, pd_mul,
                                         pd_power, w_coordinates)

P = TruncationParams()
seeds = st.integers(0, 10**6)


def u(j, prec=None):
    return PDElem.u_power(P, j, prec)


def rand_pd(seed, prec=3):
    rng = random.Random(seed)
    return PDElem(P, prec, {j: random_belem(P, rng, 2, prec, max_x=4, max_t=2) for j in (0, 1, 2)})


def test_divided_power_products():
    # u^[1] u^[1] = 2 u^[2], u^[2] u^[3] = 10 u^[5]
    assert pd_mul(u(1), u(1)) == u(2).scale(2)
    assert pd_mul(u(2), u(3)) == u(5).scale(10)
    assert pd_power(u(1), 3) == u(3).scale(6)


def test_divided_p_power_scalars():
    assert divided_p_power(0, 5) == 1
    assert divided_p_power(5, 5) == Fraction(5**5, 120)


@given(seeds, seeds, seeds)
def test_multiplication_is_associative_and_commutative(s1, s2, s3):
    a, b, c = rand_pd(s1), rand_pd(s2), rand_pd(s3)
    assert pd_mul(a, b) == pd_mul(b, a)
    assert pd_mul(pd_mul(a, b), c) == pd_mul(a, pd_mul(b, c))


def test_ideal_generators():
    gens = ideal_generators(P, PDIdealSpec("J[r]", 3))
    assert gens == [u(j) for j in range(3, P.pd_level + 1)]
    assert ideal_generators(P, PDIdealSpec("I[r]", 0)) == [PDElem.one(P)]
    with pytest.raises(ValueError):
        PDIdealSpec("K")
    assert in_ideal_level(u(4), 3) and not in_ideal_level(u(2), 3)


def test_frobenius_D_of_u():
    # f(u) = (u + p)^p - p in B-terms: w-coordinates of f(u) and of X^(ep) - p agree
    fu = frobenius_D(u(1, 6))
    target = PDElem.from_b(BElem.monomial(P, 1, xdeg=P.e * P.p, prec=6) - 5)
    assert w_coordinates(fu) == w_coordinates(target)


@given(seeds, seeds)
def test_frobenius_D_is_multiplicative(s1, s2):
    a, b = rand_pd(s1), rand_pd(s2)
    assert w_coordinates(frobenius_D(pd_mul(a, b))) == w_coordinates(pd_mul(frobenius_D(a), frobenius_D(b)))


def test_u_in_w_basis():
    # u = X^e - p and w_e = X^e
    assert w_coordinates(u(1)) == {(2, (0,)): 1, (0, (0,)): 125 - 5}
    # u^[2] = X^4/2 - p X^2 + p^2/2 and w_4 = X^4/2
    assert w_coordinates(u(2)) == {(4, (0,)): 1, (2, (0,)): 120, (0, (0,)): (25 * pow(2, -1, 125)) % 125}


def test_divided_frobenius_divides_exactly():
    form = PDForm(1, {(0,): u(2, 6)})
    out = divided_frobenius(form, 2, 1)
    assert out.degree == 1 and (0,) in out.terms
    # coefficient f(u^[2]) / p^2 has w-coordinates of precision 4
    direct = w_coordinates(frobenius_D(u(2, 6)))
    assert all(c % 25 == 0 for c in direct.values())
    with pytest.raises(InexactDivision):
        divided_frobenius(PDForm(1, {(0,): u(1, 6)}), 2, 1)
    with pytest.raises(ValueError):
        divided_frobenius(form, 5, 1)

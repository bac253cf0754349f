from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from milnor_syntomic import series as S

M = 12


def mono(c, k, b=0):
    return S.Series.mono(M, 1, c, k, (b,))


coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@given(coeffs, coeffs, st.integers(1, 3))
def test_exp_log_inverse(c1, c2, k):
    z = mono(c1, k) + mono(c2, k + 1, 1)
    assert S.log(S.exp(z)) == z
    u = S.exp(z)
    assert u * S.inverse(u) == S.Series.const(M, 1)


def test_exp_rejects_constant_part():
    with pytest.raises(S.SeriesError):
        S.exp(S.Series.const(M, 1, 2))


def test_artin_hasse_has_integral_coefficients():
    # E_1(X) is p-integral: all coefficients have non-negative 5-valuation
    e1 = S.artin_hasse(mono(1, 1), 5)
    assert e1.min_valuation(5) >= 0
    # and it agrees with exp(X) below degree p
    ex = S.exp(mono(1, 1))
    assert all(e1.terms.get((k, (0,)), 0) == ex.terms.get((k, (0,)), 0) for k in range(5))


def test_frobenius_and_d():
    s = mono(Fraction(1, 2), 2, 3)
    assert S.frobenius(s, 5).terms == {(10, (15,)): Fraction(1, 2)}
    ds = S.d_series(s)
    assert ds.degree == 1

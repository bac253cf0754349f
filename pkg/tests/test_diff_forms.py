import random

import pytest
from hypothesis import given, strategies as st

from milnor_syntomic.base_rings import BElem, LaurentElem, random_belem
from milnor_syntomic.diff_forms import (DiffForm, b_dims, b_group_basis, d, dlog, dx_form, in_b_group,
                                        inverse_cartier, omega_k_dim, scalar_form, wedge, zfrak_membership)
from milnor_syntomic.params import TruncationParams

P = TruncationParams()
P2 = TruncationParams(m_pbase=2, win=25, x_trunc=30)
seeds = st.integers(0, 10**6)


def rand_form(params, seed, degree):
    rng = random.Random(seed)
    from milnor_syntomic.diff_forms import form_labels
    labs = form_labels(params.m_pbase, degree, with_x=True)
    return DiffForm("B", degree, {lab: random_belem(params, rng, 2, max_x=5, max_t=3) for lab in labs})


def test_d_of_monomials():
    x = BElem(P, 3, {(3, (2,)): 1})  # X^3 T^2
    dx = d(scalar_form("B", x))
    # d(X^3 T^2) = 2 X^3 T^2 dT/T + 3 X^2 T^2 dX
    assert dx.terms[(0,)] == BElem(P, 3, {(3, (2,)): 2})
    assert dx.terms[(1,)] == BElem(P, 3, {(2, (2,)): 3})


@given(seeds, st.integers(0, 1))
def test_d_squared_is_zero(seed, deg):
    assert d(d(rand_form(P2, seed, deg))).is_zero()


@given(seeds, seeds)
def test_leibniz(s1, s2):
    a = rand_form(P2, s1, 0)
    b = rand_form(P2, s2, 1)
    assert d(wedge(a, b)) == wedge(d(a), b) + wedge(a, d(b))


def test_wedge_is_graded_commutative():
    t = dlog(P2, 0)
    s = dlog(P2, 1)
    assert wedge(t, s) == -wedge(s, t)
    assert wedge(t, t).is_zero()


def test_dpi_torsion_on_A():
    # pi^(e-1) dpi = 0 on A
    from milnor_syntomic.base_rings import AElem
    form = DiffForm("A", 1, {(1,): AElem.pi(P)})
    assert form.is_zero()
    assert not dx_form(P, "A").is_zero()


def test_inverse_cartier_is_pth_power_on_coefficients():
    om = DiffForm("k", 1, {(0,): LaurentElem(P, 1, {(0, (2,)): 3})})
    assert inverse_cartier(om) == DiffForm("k", 1, {(0,): LaurentElem(P, 1, {(0, (10,)): 3})})
    with pytest.raises(ValueError):
        inverse_cartier(dlog(P, 0))


def test_b_groups_one_variable():
    # m = 1: B_s^1 at degree b is F_p when 0 < v_p(b) + 1 <= s, i.e. p^s does not divide b
    dims1 = b_dims(P, 1, 1)
    assert dims1[(1,)] == 1 and dims1[(5,)] == 0 and dims1[(0,)] == 0
    dims2 = b_dims(P, 2, 1)
    assert dims2[(5,)] == 1 and dims2[(25,)] == 0
    assert omega_k_dim(P, 1) == 1 and omega_k_dim(P, 2) == 0


def test_b_group_membership():
    basis = b_group_basis(P, 1, 1)
    assert len(basis) == sum(b_dims(P, 1, 1).values())
    assert all(in_b_group(P, w, 1) for w in basis)
    om = DiffForm("k", 1, {(0,): LaurentElem(P, 1, {(0, (5,)): 1})})
    assert not in_b_group(P, om, 1) and in_b_group(P, om, 2)


def test_zfrak_membership():
    # T^5 dT/T is closed; T^5 as a 0-form has d = 5 T^5 dT/T, which lies in p Omega
    closed = DiffForm("A0", 1, {(0,): LaurentElem(P, 3, {(0, (5,)): 1})})
    assert zfrak_membership(closed, 3)
    zero_form = scalar_form("A0", LaurentElem(P, 3, {(0, (5,)): 1}))
    assert zfrak_membership(zero_form, 1) and not zfrak_membership(zero_form, 2)

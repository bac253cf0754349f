import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from milnor_syntomic import series as S
from milnor_syntomic import syntomic as Sy
from milnor_syntomic.complexes import cohomology_length
from milnor_syntomic.params import HypothesisError, TruncationParams

P = TruncationParams()


@pytest.fixture(scope="module")
def ctx():
    return Sy.ChainContext(P, (1,))


def test_chains_cover_the_window():
    bases = Sy.chain_bases(P)
    # b = 0 plus the 40 integers in [-25, 25] prime to 5
    assert len(bases) == 41 and (0,) in bases
    assert Sy.t_chain(P, (1,)) == [(1,), (5,), (25,), (125,)]
    assert Sy.chain_of(P, (50,)) == (2,) and Sy.chain_of(P, (0,)) == (0,)


def test_complex_shapes(ctx):
    s, sp, mod = Sy.build_syntomic(ctx), Sy.build_syntomic_prime(ctx), Sy.build_modified(ctx)
    assert len(s.ranks) == len(sp.ranks) == P.q + 2
    # at q = 2 the truncation below degree q - 2 = 0 does nothing
    assert sp.ranks == mod.ranks
    assert cohomology_length(s, 0) == 0


def test_inclusion_is_a_chain_map(ctx):
    f = Sy.syntomic_inclusion(ctx)
    assert f.src.ranks == Sy.build_syntomic(ctx).ranks


def test_exact_sequence_on_one_chain(ctx):
    rep = Sy.sequence_exactness(ctx)
    assert rep.ok and rep.composite_zero and rep.ker_length == rep.im_length > 0


def test_iso_one_roundtrip(ctx):
    v = ctx.f_zero()
    v[3] = 2
    v[len(v) // 2] = 7
    back = Sy.iso_one_inverse(ctx, Sy.iso_one(ctx, v))
    assert np.array_equal(back % ctx.ring.modulus, v % ctx.ring.modulus)


@settings(max_examples=10)
@given(st.integers(0, 10**6))
def test_class_map_lands_in_cocycles(seed):
    x = Sy.random_uxelem(P, random.Random(seed))
    bases = {Sy.chain_of(P, b) for s in x.series().terms.values() for (_k, b) in s.terms}
    for b in bases:
        assert Sy.class_map_is_cocycle(Sy.ChainContext(P, b), x)


@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_sq_after_Eq_is_minus_identity(seed, q):
    x = Sy.random_uxelem(P, random.Random(seed), q=q)
    assert x.check()
    assert Sy.sq_identity_defect(x).is_zero()


def test_E_q_shape():
    x = Sy.random_uxelem(P, random.Random(4), q=2)
    syms = Sy.E_q(x)
    assert syms and all(sym.entries[0][0] == "E1" and len(sym.entries) == 2 for sym in syms)
    assert str(syms[0]).startswith("{E1(")


def test_artin_hasse_E1_of_X():
    from milnor_syntomic.base_rings import BElem
    from milnor_syntomic.pd_envelope import PDElem
    e1 = Sy.artin_hasse_E1(PDElem.from_b(BElem.X(P)))
    assert e1.constant_term() == 1 and e1.min_valuation(5) >= 0
    assert e1 == S.artin_hasse(S.Series.mono(P.x_trunc, 1, 1, 1), 5)


def test_rejects_q_at_least_p():
    with pytest.raises(HypothesisError, match="q < p"):
        Sy.build_syntomic(Sy.ChainContext(P, (1,)), q=5)

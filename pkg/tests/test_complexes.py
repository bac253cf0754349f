import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from milnor_syntomic import complexes as C
from milnor_syntomic.linalg import Ring

R = Ring(5, 2)


def test_cohomology_of_multiplication_by_p():
    # Z/25 --5--> Z/25: H^0 = 5Z/25 = Z/5, H^1 = Z/5
    c = C.FinComplex(R, [1, 1], [R.array([[5]])])
    assert C.cohomology(c, 0).invariant_factors() == [1]
    assert C.cohomology(c, 1).invariant_factors() == [1]
    assert C.cohomology_length(c, 1) == 1


def test_d_squared_checked():
    with pytest.raises(ValueError):
        C.FinComplex(R, [1, 1, 1], [R.array([[1]]), R.array([[1]])])


def test_truncation_and_shift():
    c = C.FinComplex(R, [1, 2, 1], [R.array([[1], [0]]), R.array([[0, 1]])])
    t = C.truncate_geq(c, 1)
    assert C.cohomology_length(t, 0) == 0
    # brutal truncation: H^1 becomes all of Z^1 = ker d^1 = Z/25, higher degrees are unchanged
    assert C.cohomology_length(t, 1) == 2
    assert C.cohomology_length(t, 2) == C.cohomology_length(c, 2)
    assert C.shift_down(c).ranks[0] == 0


@given(st.integers(0, 10**6))
def test_random_mapping_fiber_les_is_exact(seed):
    rng = random.Random(seed)
    src = C.random_complex(R, rng, 4, 4)
    tgt = C.random_complex(R, rng, 4, 4)
    f = C.random_chain_map(src, tgt, rng)
    assert f.check
    assert C.les_exact(C.mapping_fiber_sequence(f))


def test_fiber_of_identity_is_acyclic():
    rng = random.Random(3)
    c = C.random_complex(R, rng, 3, 4)
    mf = C.mapping_fiber(C.identity_map(c))
    assert all(C.cohomology_length(mf, i) == 0 for i in range(mf.top + 1))


def test_json_roundtrip():
    c = C.random_complex(R, random.Random(1), 3, 3)
    back = C.FinComplex.from_json(C.FinComplex.to_json(c))
    assert back.ranks == c.ranks
    assert all(np.array_equal(a % 25, b % 25) for a, b in zip(back.diffs, c.diffs))

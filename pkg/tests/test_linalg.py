import itertools

import numpy as np
from hypothesis import given, strategies as st

from milnor_syntomic.linalg import (Ring, contains, intersection, invariant_exponents, kernel, preimage, smith,
                                    solve, span_length, zp_kernel)

R = Ring(3, 2)  # Z/9, small enough for brute force


def mats(rows, cols):
    return st.lists(st.integers(0, 8), min_size=rows * cols, max_size=rows * cols).map(
        lambda xs: R.array(xs).reshape(rows, cols))


def brute_span(a):
    cols = a.shape[1]
    return {tuple(R.matmul(a, np.array(c, dtype=np.int64).reshape(-1, 1))[:, 0])
            for c in itertools.product(range(9), repeat=cols)}


@given(mats(3, 3))
def test_span_length_matches_brute_force(a):
    assert 3 ** span_length(R, a) == len(brute_span(a))


@given(mats(3, 4))
def test_smith_form(a):
    sf = smith(R, a, track_u=True)
    diag = R.matmul(R.matmul(sf.U, a), sf.V)
    for i in range(diag.shape[0]):
        for j in range(diag.shape[1]):
            want = 3 ** sf.exps[i] if i == j and i < sf.rank else 0
            assert diag[i, j] % 9 == want % 9


@given(mats(2, 3))
def test_kernel_is_full(a):
    ker = kernel(R, a)
    assert not R.matmul(a, ker).any()
    brute = [c for c in itertools.product(range(9), repeat=3)
             if not R.matmul(a, np.array(c).reshape(-1, 1)).any()]
    assert 3 ** span_length(R, ker) == len(brute)


@given(mats(3, 2), mats(3, 2))
def test_intersection_and_preimage(a, b):
    inter = intersection(R, a, b)
    assert contains(R, a, inter) and contains(R, b, inter)
    pre = preimage(R, a, b)
    assert contains(R, b, R.matmul(a, pre))


def test_zp_kernel_has_no_torsion_artefacts():
    # over Z/9 the kernel of [3] contains 3; over Z_3 it is zero
    a = R.array([[3]])
    assert span_length(R, kernel(R, a)) == 1
    ker, acc = zp_kernel(R, a, with_accuracy=True)
    assert ker.shape[1] == 0 and acc == 1


def test_solve_and_invariants():
    a = R.array([[3, 0], [0, 1]])
    assert invariant_exponents(R, a) == [1, 2]
    x = solve(R, a, np.array([6, 4]))
    assert x is not None and list(R.matmul(a, x.reshape(-1, 1))[:, 0]) == [6, 4]
    assert solve(R, a, np.array([1, 0])) is None

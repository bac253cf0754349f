"""Monomial lattices inside D (x) Omega_B.

In the basis w_k = X^k / floor(k/e)! the PD-envelope D is X-graded, and so are
I^[r] and the X-filtration pieces fil_i(I^[r] (x) Omega^s).  Each such module is,
in every bidegree (X-degree m, T-multidegree b) and wedge label, a rank-one
lattice p^c Z_p X^m T^b label.  A module is therefore a dict key -> c.

Labels are sorted index tuples; indices 0..mbase-1 stand for dT_i/T_i and the
index mbase for dX/X.  d preserves (m, b); the Frobenius sends (m, b) to
(p m, p b) and multiplies a label of size s by p^s.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from .linalg import Ring
from .params import TruncationParams


def vp_factorial(n: int, p: int) -> int:
    total, q = 0, n
    while q:
        q //= p
        total += q
    return total


def vp_divided_power(l: int, p: int) -> int:
    """v_p(p^l / l!)."""
    return l - vp_factorial(l, p)


Key = tuple  # (m, b, label)


def labels(mbase: int, degree: int, with_x: bool = True) -> list[tuple[int, ...]]:
    idx = list(range(mbase + 1 if with_x else mbase))
    return [tuple(c) for c in combinations(idx, degree)]


def wedge_sign(index: int, label: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """Sign and label of d(index) ^ label, None if index already present."""
    if index in label:
        return None
    pos = sum(1 for j in label if j < index)
    return (-1) ** pos, tuple(sorted(label + (index,)))


@lru_cache(maxsize=None)
def fil_exponent(p: int, e: int, i: int, r: int, m: int, has_x: bool) -> int | None:
    """Valuation c with fil_i(I^[r] (x) Omega) = p^c Z_p X^m ... in degree m.

    Enumerates the generators X^n (X^e)^[j] p^[l] a omega with n + e j >= i,
    j + l >= r (n >= 1 on dX/X labels) and a = w_k; returns None when empty.
    """
    r = max(r, 0)
    best = None
    for j in range(m // e + 1):
        l = max(r - j, 0)
        base = vp_divided_power(l, p) - vp_factorial(j, p)
        for n in range(1 if has_x else 0, m - e * j + 1):
            if n + e * j < i:
                continue
            k = m - n - e * j
            c = base - vp_factorial(k // e, p)
            if best is None or c < best:
                best = c
    return best


def module_exponent(params: TruncationParams, kind: str, r: int, i: int, key: Key) -> int | None:
    """Lattice exponent of the named monomial module at a key.

    kind "D" is D (x) Omega, kind "I" is fil_i(I^[r] (x) Omega).
    """
    m, b, label = key
    has_x = params.m_pbase in label
    if has_x and m == 0:
        return None
    if kind == "D":
        return fil_exponent(params.p, params.e, 0, 0, m, has_x)
    if kind == "I":
        return fil_exponent(params.p, params.e, i, r, m, has_x)
    raise ValueError(kind)


@dataclass
class Block:
    """One Frobenius orbit {(m p^k, b p^k)} of bidegrees inside the truncation."""

    points: list[tuple[int, tuple[int, ...]]]

    @property
    def base(self):
        return self.points[0]


def in_window(params: TruncationParams, m: int, b: tuple[int, ...], win: int | None = None) -> bool:
    win = params.win if win is None else win
    return 0 <= m < params.x_trunc and all(abs(x) <= win for x in b)


def orbit_blocks(params: TruncationParams, t_degrees=None, win: int | None = None) -> list[Block]:
    """All Frobenius orbits of (X-degree, T-degree) pairs within the truncation.

    win overrides the T-window (used for the guard band).
    """
    p = params.p
    W = params.win if win is None else win
    rng = range(-W, W + 1)
    tds = list(product(rng, repeat=params.m_pbase)) if t_degrees is None else list(t_degrees)
    tset = set(tds)
    blocks = []
    for b in tds:
        for m in range(params.x_trunc):
            if m == 0 and not any(b):
                if b in tset:
                    blocks.append(Block([(0, b)]))
                continue
            if m % p == 0 and all(x % p == 0 for x in b):
                continue
            pts = []
            mm, bb = m, b
            while in_window(params, mm, bb, W) and bb in tset:
                pts.append((mm, bb))
                mm, bb = mm * p, tuple(x * p for x in bb)
            blocks.append(Block(pts))
    return blocks


@dataclass
class Term:
    """A monomial lattice module restricted to a set of bidegrees."""

    keys: list[Key]
    exps: list[int]
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        self.index = {k: n for n, k in enumerate(self.keys)}

    def __len__(self):
        return len(self.keys)


def make_term(params: TruncationParams, points, degree: int, kind: str, r: int = 0, i: int = 0) -> Term:
    keys, exps = [], []
    if degree < 0:
        return Term([], [])
    for m, b in points:
        for lab in labels(params.m_pbase, degree):
            key = (m, b, lab)
            c = module_exponent(params, kind, r, i, key)
            if c is None:
                continue
            keys.append(key)
            exps.append(c)
    return Term(keys, exps)


def _put(ring: Ring, mat, row: int, col: int, coef: int, shift: int):
    """Add coef * p^shift to mat[row, col]; shift must be non-negative."""
    if shift < 0:
        if coef % ring.p ** (-shift):
            raise ArithmeticError("map does not preserve the lattices")
        coef //= ring.p ** (-shift)
        shift = 0
    mat[row, col] = (int(mat[row, col]) + coef * ring.p**shift) % ring.modulus


def d_matrix(ring: Ring, params: TruncationParams, src: Term, tgt: Term) -> np.ndarray:
    mat = ring.zeros(len(tgt), len(src))
    for col, (key, c) in enumerate(zip(src.keys, src.exps)):
        m, b, lab = key
        weights = list(b) + [m]
        for idx, w in enumerate(weights):
            if w == 0:
                continue
            ws = wedge_sign(idx, lab)
            if ws is None:
                continue
            sign, new = ws
            tkey = (m, b, new)
            row = tgt.index.get(tkey)
            if row is None:
                continue
            _put(ring, mat, row, col, sign * w, c - tgt.exps[row])
    return mat


def frob_matrix(ring: Ring, params: TruncationParams, src: Term, tgt: Term, q: int) -> np.ndarray:
    """Matrix of f_q = f / p^q from src to tgt (same form degree)."""
    p = params.p
    mat = ring.zeros(len(tgt), len(src))
    for col, (key, c) in enumerate(zip(src.keys, src.exps)):
        m, b, lab = key
        tkey = (m * p, tuple(x * p for x in b), lab)
        row = tgt.index.get(tkey)
        if row is None:
            continue
        _put(ring, mat, row, col, 1, c - tgt.exps[row] + len(lab) - q)
    return mat


def incl_matrix(ring: Ring, src: Term, tgt: Term) -> np.ndarray:
    mat = ring.zeros(len(tgt), len(src))
    for col, (key, c) in enumerate(zip(src.keys, src.exps)):
        row = tgt.index.get(key)
        if row is None:
            continue
        _put(ring, mat, row, col, 1, c - tgt.exps[row])
    return mat

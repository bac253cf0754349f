"""Differential forms over the ring models, d, wedge, C^{-1} and B_s.

Basis labels are sorted index tuples.  Index i < m stands for dT_i/T_i; index m
stands for dX on B and for dpi on A (k and A_0 only use the dlog part).  On A
the coefficient of any label containing dpi lives in A/(pi^(e-1)), which we
normalise immediately, so pi^(e-1) dpi = 0 holds identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from .base_rings import AElem, BElem, LaurentElem, _Sparse
from .linalg import Ring, span_length
from .params import TruncationParams

RING_TYPES = {"k": LaurentElem, "A0": LaurentElem, "B": BElem, "A": AElem}


class InsufficientPrecision(ArithmeticError):
    pass


def form_labels(m: int, degree: int, with_x: bool) -> list[tuple[int, ...]]:
    idx = range(m + 1) if with_x else range(m)
    return [tuple(c) for c in combinations(idx, degree)]


def merge_labels(a: tuple, b: tuple) -> tuple[int, tuple] | None:
    """Sign and merged label of a ^ b, None when they share an index."""
    if set(a) & set(b):
        return None
    seq = list(a) + list(b)
    inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return (-1) ** inversions, tuple(sorted(seq))


@dataclass(frozen=True)
class DiffForm:
    ring: str
    degree: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for lab, coef in self.terms.items():
            lab = tuple(lab)
            if len(lab) != self.degree:
                raise ValueError(f"label {lab} has the wrong degree")
            if self.ring == "A" and coef.params.m_pbase in lab:
                coef = _torsion_normalise(coef)
            if not coef.is_zero():
                clean[lab] = clean[lab] + coef if lab in clean else coef
        object.__setattr__(self, "terms", {k: v for k, v in clean.items() if not v.is_zero()})

    @property
    def params(self) -> TruncationParams | None:
        for coef in self.terms.values():
            return coef.params
        return None

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, DiffForm)
            and self.ring == other.ring
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.ring, self.degree, frozenset(self.terms.items())))

    def __add__(self, other: "DiffForm") -> "DiffForm":
        if other.ring != self.ring or other.degree != self.degree:
            raise ValueError("incompatible forms")
        out = dict(self.terms)
        for lab, c in other.terms.items():
            out[lab] = out[lab] + c if lab in out else c
        return DiffForm(self.ring, self.degree, out)

    def __neg__(self):
        return DiffForm(self.ring, self.degree, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "DiffForm":
        """Multiply by a ring element or an integer."""
        return DiffForm(self.ring, self.degree, {k: v * c for k, v in self.terms.items()})

    def __repr__(self):
        if not self.terms:
            return f"DiffForm[{self.ring}]^{self.degree}(0)"
        return f"DiffForm[{self.ring}]^{self.degree}({self.terms})"

    def to_json(self) -> dict:
        return {
            "ring": self.ring,
            "degree": self.degree,
            "terms": [
                [list(lab), [[k, list(b), c] for (k, b), c in sorted(coef.terms.items())]]
                for lab, coef in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict, params: TruncationParams, prec: int) -> "DiffForm":
        typ = RING_TYPES[data["ring"]]
        terms = {}
        for lab, coef in data["terms"]:
            terms[tuple(lab)] = typ(params, prec, {(k, tuple(b)): c for k, b, c in coef})
        return cls(data["ring"], data["degree"], terms)


def _torsion_normalise(coef: AElem) -> AElem:
    """Reduce a dpi-coefficient modulo pi^(e-1) (which contains p when e >= 2)."""
    e, p = coef.params.e, coef.params.p
    if e == 1:
        return AElem.zero(coef.params, coef.prec)
    return AElem(coef.params, coef.prec, {(k, b): c % p for (k, b), c in coef.terms.items() if k < e - 1})


def scalar_form(ring: str, coef: _Sparse) -> DiffForm:
    return DiffForm(ring, 0, {(): coef})


def dlog(params: TruncationParams, i: int, ring: str = "B", prec=None) -> DiffForm:
    """dT_i/T_i as a degree-one form."""
    typ = RING_TYPES[ring]
    prec = _prec_for(params, ring, prec)
    return DiffForm(ring, 1, {(i,): typ.one(params, prec)})


def dx_form(params: TruncationParams, ring: str = "B", prec=None) -> DiffForm:
    """dX on B, dpi on A."""
    typ = RING_TYPES[ring]
    prec = _prec_for(params, ring, prec)
    return DiffForm(ring, 1, {(params.m_pbase,): typ.one(params, prec)})


def _prec_for(params, ring, prec):
    if prec is not None:
        return prec
    return 1 if ring == "k" else params.n_prec


def _d_coef(ring: str, coef: _Sparse) -> dict:
    """d of a scalar: label (single index) -> coefficient."""
    params = coef.params
    m = params.m_pbase
    typ = type(coef)
    out: dict = {}
    for (k, b), c in coef.terms.items():
        for i, bi in enumerate(b):
            if bi:
                out.setdefault((i,), {})
                out[(i,)][(k, b)] = out[(i,)].get((k, b), 0) + bi * c
        if k and ring in ("B", "A"):
            out.setdefault((m,), {})
            out[(m,)][(k - 1, b)] = out[(m,)].get((k - 1, b), 0) + k * c
    return {lab: typ(params, coef.prec, t) for lab, t in out.items()}


def d(omega: DiffForm) -> DiffForm:
    """Exterior derivative, computed monomial by monomial."""
    out: dict = {}
    for lab, coef in omega.terms.items():
        for dlab, dcoef in _d_coef(omega.ring, coef).items():
            merged = merge_labels(dlab, lab)
            if merged is None:
                continue
            sign, new = merged
            term = dcoef * sign
            out[new] = out[new] + term if new in out else term
    return DiffForm(omega.ring, omega.degree + 1, out)


def wedge(a: DiffForm, b: DiffForm) -> DiffForm:
    if a.ring != b.ring:
        raise ValueError("wedge of forms over different rings")
    out: dict = {}
    for la, ca in a.terms.items():
        for lb, cb in b.terms.items():
            merged = merge_labels(la, lb)
            if merged is None:
                continue
            sign, new = merged
            term = (ca * cb) * sign
            out[new] = out[new] + term if new in out else term
    return DiffForm(a.ring, a.degree + b.degree, out)


def inverse_cartier(omega: DiffForm) -> DiffForm:
    """C^{-1}(x dlog) = x^p dlog on forms over k; a representative mod B_1."""
    if omega.ring != "k":
        raise ValueError("the inverse Cartier operator acts on forms over k")
    p = None
    out = {}
    for lab, coef in omega.terms.items():
        p = coef.params.p
        # over F_p, (sum c T^b)^p = sum c T^(p b)
        t = {(0, tuple(p * x for x in b)): c for (_k, b), c in coef.terms.items()}
        out[lab] = LaurentElem(coef.params, coef.prec, t)
    return DiffForm("k", omega.degree, out)


# --- B_s and window-graded linear algebra over F_p -------------------------


def window_degrees(params: TruncationParams):
    rng = range(-params.win, params.win + 1)
    return list(product(rng, repeat=params.m_pbase))


def _d_row(b: tuple, src_lab: tuple, tgt_labels: list, p: int) -> np.ndarray:
    """Coordinates of d(T^b src_lab) in the dlog labels of one degree higher."""
    vec = np.zeros(len(tgt_labels), dtype=np.int64)
    index = {lab: n for n, lab in enumerate(tgt_labels)}
    for i, bi in enumerate(b):
        if bi % p == 0:
            continue
        merged = merge_labels((i,), src_lab)
        if merged is None:
            continue
        sign, new = merged
        vec[index[new]] = (vec[index[new]] + sign * bi) % p
    return vec


def b_spaces(params: TruncationParams, s: int, q: int) -> dict:
    """Per-degree F_p-spans of B_s^q: degree -> matrix whose columns span B_s at that degree.

    B_0 = 0, B_1 = d(Omega^{q-1}), B_{s+1} = B_1 + C^{-1}(B_s).  Both d and C^{-1}
    are homogeneous (C^{-1} multiplies the degree by p), so the recursion runs
    degree by degree.
    """
    p, m = params.p, params.m_pbase
    tgt = form_labels(m, q, with_x=False)
    src = form_labels(m, q - 1, with_x=False) if q >= 1 else []
    degrees = window_degrees(params)
    empty = {b: np.zeros((len(tgt), 0), dtype=np.int64) for b in degrees}
    if s <= 0 or q < 1:
        return empty
    b1 = {}
    for b in degrees:
        cols = [_d_row(b, lab, tgt, p) for lab in src]
        b1[b] = np.stack(cols, axis=1) if cols else empty[b]
    current = b1
    for _ in range(s - 1):
        nxt = {}
        for b in degrees:
            cols = [b1[b]]
            if all(x % p == 0 for x in b):
                lower = tuple(x // p for x in b)
                # C^{-1} keeps dlog coordinates, so the span is transported as is
                cols.append(current[lower])
            nxt[b] = np.concatenate(cols, axis=1)
        current = nxt
    return current


def b_dims(params: TruncationParams, s: int, q: int) -> dict:
    ring = Ring(params.p, 1)
    return {b: span_length(ring, mat % params.p) if mat.size else 0 for b, mat in b_spaces(params, s, q).items()}


def omega_k_dim(params: TruncationParams, q: int) -> int:
    """Dimension of each graded piece of Omega_k^q."""
    return len(form_labels(params.m_pbase, q, with_x=False)) if q >= 0 else 0


def b_group_basis(params: TruncationParams, s: int, q: int) -> list[DiffForm]:
    """An F_p-basis of B_s^q inside the window, as forms over k."""
    ring = Ring(params.p, 1)
    labels = form_labels(params.m_pbase, q, with_x=False)
    basis = []
    for b, mat in b_spaces(params, s, q).items():
        if not mat.size:
            continue
        cols = _independent_columns(ring, mat % params.p)
        for col in cols:
            terms = {}
            for lab, c in zip(labels, col):
                if c:
                    terms[lab] = LaurentElem(params, 1, {(0, b): int(c)})
            basis.append(DiffForm("k", q, terms))
    return basis


def _independent_columns(ring: Ring, mat: np.ndarray) -> list[np.ndarray]:
    chosen: list[np.ndarray] = []
    rank = 0
    for j in range(mat.shape[1]):
        trial = np.stack(chosen + [mat[:, j]], axis=1)
        r = span_length(ring, trial)
        if r > rank:
            chosen.append(mat[:, j])
            rank = r
    return chosen


def in_b_group(params: TruncationParams, omega: DiffForm, s: int) -> bool:
    """Membership of a k-form in B_s (within the window)."""
    ring = Ring(params.p, 1)
    labels = form_labels(params.m_pbase, omega.degree, with_x=False)
    spaces = b_spaces(params, s, omega.degree)
    by_degree: dict = {}
    for lab, coef in omega.terms.items():
        for (_k, b), c in coef.terms.items():
            by_degree.setdefault(b, np.zeros(len(labels), dtype=np.int64))
            by_degree[b][labels.index(lab)] = c % params.p
    for b, vec in by_degree.items():
        if not vec.any():
            continue
        mat = spaces.get(b)
        if mat is None:
            raise ArithmeticError(f"degree {b} outside the window")
        if span_length(ring, np.concatenate([mat, vec[:, None]], axis=1) % params.p) != (
            span_length(ring, mat % params.p) if mat.size else 0
        ):
            return False
    return True


def zfrak_membership(omega: DiffForm, n: int) -> bool:
    """omega in ker(Omega_{A_0} -> Omega_{A_0}/p^n), i.e. d(omega) = 0 mod p^n."""
    if omega.ring != "A0":
        raise ValueError("zfrak_membership expects a form over A_0")
    if n <= 0:
        return True
    params = omega.params
    prec = next(iter(omega.terms.values())).prec if omega.terms else None
    if prec is not None and n > prec:
        raise InsufficientPrecision(f"n={n} exceeds the precision {prec}")
    pn = params.p**n if params else 1
    return all(c % pn == 0 for coef in d(omega).terms.values() for c in coef.terms.values())


# --- Omega_A^q as a Z/p^P lattice on a set of T-degrees --------------------------


class OmegaAModule:
    """Omega_A^q restricted to the T-degrees in tdegs, as coordinates over Z/p^P.

    Coordinates are (n, b, label) with n < e standing for pi^n T^b label; the
    label index m is dpi (not dlog).  Relations are kept separately:
    pi^(e-1) dpi = 0 and, optionally, p d Omega_A^(q-1).
    """

    def __init__(self, params: TruncationParams, tdegs, degree: int, ring: Ring):
        self.params = params
        self.tdegs = [tuple(b) for b in tdegs]
        self.degree = degree
        self.ring = ring
        m, e = params.m_pbase, params.e
        self.keys = [(n, b, lab) for b in self.tdegs for n in range(e) for lab in form_labels(m, degree, True)]
        self.index = {k: i for i, k in enumerate(self.keys)}

    def __len__(self):
        return len(self.keys)

    def zero(self) -> np.ndarray:
        return self.ring.zeros(len(self.keys), 1)[:, 0]

    def put(self, vec, n: int, b, lab, coef: int, pexp: int):
        """vec += coef p^pexp pi^n T^b lab, rewriting pi^e = p."""
        e, p = self.params.e, self.params.p
        pexp += n // e
        n %= e
        if pexp >= self.ring.prec:
            return
        if pexp < 0:
            raise ArithmeticError("element is not integral on A")
        i = self.index[(n, tuple(b), lab)]
        vec[i] = (int(vec[i]) + coef * p**pexp) % self.ring.modulus

    def _stack(self, cols) -> np.ndarray:
        if not cols:
            return self.ring.zeros(len(self.keys), 0)
        return np.stack(cols, axis=1) % self.ring.modulus

    def torsion_relations(self) -> np.ndarray:
        """pi^(e-1+n) dpi ^ omega' = 0."""
        m, e = self.params.m_pbase, self.params.e
        cols = []
        for b in self.tdegs:
            for n in range(e):
                for lab in form_labels(m, self.degree - 1, False):
                    v = self.zero()
                    self.put(v, n + e - 1, b, tuple(sorted(lab + (m,))), 1, 0)
                    cols.append(v)
        return self._stack(cols)

    def pd_relations(self) -> np.ndarray:
        """p d(pi^n T^b lab') for the generators of Omega_A^(q-1); d(pi^n) = n pi^(n-1) dpi."""
        m, e = self.params.m_pbase, self.params.e
        cols = []
        for b in self.tdegs:
            for n in range(e):
                for lab in form_labels(m, self.degree - 1, True):
                    v = self.zero()
                    for idx, w in enumerate(list(b) + [n]):
                        merged = merge_labels((idx,), lab) if w else None
                        if merged is None:
                            continue
                        sign, new = merged
                        self.put(v, n - 1 if idx == m else n, b, new, sign * w, 1)
                    cols.append(v)
        return self._stack(cols)

    def relations(self, with_pd: bool = True) -> np.ndarray:
        rel = [self.torsion_relations()]
        if with_pd and self.degree >= 1:
            rel.append(self.pd_relations())
        return np.concatenate(rel, axis=1) % self.ring.modulus

    def filtration(self, i: int) -> np.ndarray:
        """fil_i = pi^i Omega + pi^(i-1) dpi ^ Omega (whole module for i = 0)."""
        m, e = self.params.m_pbase, self.params.e
        cols = []
        for b in self.tdegs:
            for lab in form_labels(m, self.degree, True):
                k = max(i - 1, 0) if m in lab else i
                for n in range(e):
                    v = self.zero()
                    self.put(v, k + n, b, lab, 1, 0)
                    cols.append(v)
        return self._stack(cols)

    def support(self, tdegs) -> np.ndarray:
        """Unit vectors of the coordinates at the given T-degrees."""
        wanted = {tuple(b) for b in tdegs}
        cols = []
        for i, (_n, b, _lab) in enumerate(self.keys):
            if b in wanted:
                v = self.zero()
                v[i] = 1
                cols.append(v)
        return self._stack(cols)

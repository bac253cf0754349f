"""Syntomic complexes S(q), S'(q), the modified complex, and the maps between them.

Everything is computed one T-chain at a time.  A T-chain is the set of
T-multidegrees {b, p b, p^2 b, ...}; the Frobenius, d and the ideal J all
preserve it, so the complexes split as a direct sum over chains.  Inside a
chain the modules are lattices in D (x) Omega with the monomial basis of
lattice.py (units p^c X^m T^b label).

Guard band: a chain is followed ext Frobenius steps past the window W, and
only T-degrees with |b| <= W are reported.  The top of a truncated chain
loses f_q and would otherwise show spurious classes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import factorial

import numpy as np

from . import lattice as L
from . import series as S
from .diff_forms import OmegaAModule
from .complexes import ChainMap, FinComplex, mapping_fiber, truncate_geq
from .linalg import (Ring, _cat, contains, intersection, kernel, left_inverse, preimage,
                     quotient_length, same_span, span_length)
from .params import HypothesisError, TruncationParams
from .pd_envelope import PDElem, divided_p_power, zp_residue

# --- T-chains ---------------------------------------------------------------


def chain_bases(params: TruncationParams) -> list[tuple[int, ...]]:
    """Base points of all T-chains meeting the window: b = 0 or b not divisible by p."""
    W, p = params.win, params.p
    out = []
    for b in product(range(-W, W + 1), repeat=params.m_pbase):
        if any(b) and all(x % p == 0 for x in b):
            continue
        out.append(b)
    return out


def t_chain(params: TruncationParams, base: tuple[int, ...], ext: int = 1) -> list[tuple[int, ...]]:
    limit = params.win * params.p**ext
    if not any(base):
        return [base]
    out, b = [], base
    while all(abs(x) <= limit for x in b):
        out.append(b)
        b = tuple(params.p * x for x in b)
    return out


def chain_of(params: TruncationParams, b: tuple[int, ...]) -> tuple[int, ...]:
    """Base point of the chain containing b."""
    b = tuple(b)
    if not any(b):
        return b
    while all(x % params.p == 0 for x in b):
        b = tuple(x // params.p for x in b)
    return b


# --- per-chain context -----------------------------------------------------------


class ChainContext:
    """Lattices and maps on one T-chain.

    Coordinates of D (x) Omega^s are the keys of dterm(s).  J^[r] is not
    X-graded; its generators X^n u^[j] T^b label (n < e, j >= r) are kept as
    exact columns at precision work_prec + q + 2 so that f_q can divide.
    """

    def __init__(self, params: TruncationParams, base: tuple[int, ...], ext: int = 1):
        self.params = params
        self.base = tuple(base)
        self.ext = ext
        self.ring = Ring(params.p, params.work_prec)
        self.hi = Ring(params.p, params.work_prec + params.q + 2)
        self.chain = t_chain(params, self.base, ext)
        self.inner = [b for b in self.chain if all(abs(x) <= params.win for x in b)]
        self.points = [(m, b) for b in self.chain for m in range(params.x_trunc)]
        self._terms: dict = {}

    @property
    def q(self) -> int:
        return self.params.q

    @property
    def mbase(self) -> int:
        return self.params.m_pbase

    # lattice terms

    def dterm(self, s: int) -> L.Term:
        return self._term(s, "D", 0, 0)

    def iterm(self, s: int, r: int, i: int = 0) -> L.Term:
        return self._term(s, "I", r, i)

    def _term(self, s, kind, r, i):
        key = (s, kind, r, i)
        if key not in self._terms:
            if s < 0 or s > self.mbase + 1:
                self._terms[key] = L.Term([], [])
            else:
                self._terms[key] = L.make_term(self.params, self.points, s, kind, r, i)
        return self._terms[key]

    # maps in D-coordinates

    def d_matrix(self, s: int) -> np.ndarray:
        return L.d_matrix(self.ring, self.params, self.dterm(s), self.dterm(s + 1))

    def i_generators(self, s: int, r: int, i: int = 0) -> np.ndarray:
        """fil_i(I^[r]) (x) Omega^s as columns in D-coordinates."""
        return L.incl_matrix(self.ring, self.iterm(s, r, i), self.dterm(s))

    def fq_on_i(self, s: int, r: int, q: int | None = None, i: int = 0) -> np.ndarray:
        q = self.q if q is None else q
        return L.frob_matrix(self.ring, self.params, self.iterm(s, r, i), self.dterm(s), q)

    def j_generators(self, s: int, r: int, extra: bool = False) -> np.ndarray:
        """X^n u^[j] T^b label (n < e, j >= r) in D-coordinates at the high precision.

        X^n u^[j] = sum_i (-1)^(j-i) p^<j-i> w_(n+e i), and the D unit at X-degree
        n + e i is exactly w_(n+e i) (shifted by one on dX/X labels).  With
        extra=True the generators whose top term fell past the X-truncation
        are included too (their truncations still lie in J mod X^M).
        """
        if r <= 0:
            return self.hi.identity(len(self.dterm(s)))
        params, hi = self.params, self.hi
        e, p, M = params.e, params.p, params.x_trunc
        term = self.dterm(s)
        cols = []
        for b in self.chain:
            for lab in L.labels(self.mbase, s):
                shift = 1 if self.mbase in lab else 0
                for n in range(e):
                    j = r
                    while True:
                        top = n + e * j + shift
                        if top >= M and not extra:
                            break
                        col = hi.zeros(len(term), 1)[:, 0]
                        for ii in range(j + 1):
                            row = term.index.get((n + e * ii + shift, b, lab))
                            if row is None:
                                continue
                            # the lattice unit is w_(n+e i) times i!/p^v(i!)
                            unit = Fraction(factorial(ii), p ** L.vp_factorial(ii, p))
                            val = divided_p_power(j - ii, p) * (-1) ** (j - ii) / unit
                            col[row] = (int(col[row]) + zp_residue(val, hi.modulus)) % hi.modulus
                        if top >= M and not col.any():
                            break
                        if col.any():
                            cols.append(col)
                        j += 1
        if not cols:
            return hi.zeros(len(term), 0)
        return np.stack(cols, axis=1)

    def fq_exact(self, gens_hi: np.ndarray, s: int, q: int | None = None) -> np.ndarray:
        """f_q of exact D-coordinate columns, reduced to work precision.

        Raises ArithmeticError when a column is not divisible, i.e. it does not
        lie in J^[q-s] (x) Omega^s.
        """
        q = self.q if q is None else q
        p = self.params.p
        term = self.dterm(s)
        mod_hi = self.hi.modulus
        out = self.ring.zeros(len(term), gens_hi.shape[1])
        for col in range(gens_hi.shape[1]):
            acc: dict = {}
            for row in np.nonzero(gens_hi[:, col])[0]:
                key, c = term.keys[row], term.exps[row]
                m, b, lab = key
                tkey = (m * p, tuple(x * p for x in b), lab)
                trow = term.index.get(tkey)
                if trow is None:
                    continue
                shift = c - term.exps[trow] + len(lab) - q
                acc[trow] = acc.get(trow, Fraction(0)) + Fraction(int(gens_hi[row, col])) * Fraction(p) ** shift
            for trow, val in acc.items():
                # values are exact modulo p^(hi.prec + shift); reduce after checking integrality
                num = val.numerator % mod_hi if val.denominator == 1 else None
                if num is None:
                    if val.denominator % p == 0:
                        raise ArithmeticError("f_q is not integral on this element")
                    num = val.numerator * pow(val.denominator, -1, mod_hi)
                out[trow, col] = num % self.ring.modulus
        return out

    def to_work(self, a_hi: np.ndarray) -> np.ndarray:
        return (a_hi % self.ring.modulus).astype(self.ring.dtype)

    def j_fq_checked(self, s: int, r: int) -> bool:
        """f(J^[r] (x) Omega^s) lies in p^(r+s) D (x) Omega^s: the division is exact."""
        try:
            self.fq_exact(self.j_generators(s, r), s, q=r + s)
        except ArithmeticError:
            return False
        return True

    # the three complexes on this chain

    def d_complex(self) -> FinComplex:
        top = self.mbase + 1
        ranks = [len(self.dterm(s)) for s in range(top + 1)]
        return FinComplex(self.ring, ranks, [self.d_matrix(s) for s in range(top)])

    def i_complex(self, q: int | None = None) -> tuple[FinComplex, list[np.ndarray]]:
        """I^[q] complex in its own monomial basis, with the inclusions into D."""
        q = self.q if q is None else q
        top = self.mbase + 1
        terms = [self.iterm(s, q - s) for s in range(top + 1)]
        diffs = [L.d_matrix(self.ring, self.params, terms[s], terms[s + 1]) for s in range(top)]
        incl = [L.incl_matrix(self.ring, terms[s], self.dterm(s)) for s in range(top + 1)]
        return FinComplex(self.ring, [len(t) for t in terms], diffs), incl

    def j_complex(self, q: int | None = None) -> tuple[FinComplex, list[np.ndarray]]:
        """J^[q] complex on the basis X^n u^[j] T^b label, with the inclusions into D."""
        q = self.q if q is None else q
        top = self.mbase + 1
        gens = [self.to_work(self.j_generators(s, q - s)) for s in range(top + 1)]
        diffs = []
        for s in range(top):
            image = self.ring.matmul(self.d_matrix(s), gens[s])
            if gens[s + 1].shape[1] == 0:
                diffs.append(self.ring.zeros(0, gens[s].shape[1]))
                continue
            linv = left_inverse(self.ring, gens[s + 1])
            coords = self.ring.matmul(linv, image)
            if ((self.ring.matmul(gens[s + 1], coords) - image) % self.ring.modulus).any():
                raise ArithmeticError("d does not preserve the J-filtration")
            diffs.append(coords)
        return FinComplex(self.ring, [g.shape[1] for g in gens], diffs), gens

    def one_minus_fq_j(self, q: int | None = None) -> list[np.ndarray]:
        q = self.q if q is None else q
        out = []
        for s in range(self.mbase + 2):
            g_hi = self.j_generators(s, q - s)
            out.append((self.to_work(g_hi) - self.fq_exact(g_hi, s, q)) % self.ring.modulus)
        return out

    def one_minus_fq_i(self, q: int | None = None) -> list[np.ndarray]:
        q = self.q if q is None else q
        _, incl = self.i_complex(q)
        return [(incl[s] - self.fq_on_i(s, q - s, q)) % self.ring.modulus for s in range(self.mbase + 2)]

    # F = Omega_A^(q-1) on this chain

    @cached_property
    def fmod(self) -> OmegaAModule:
        return OmegaAModule(self.params, self.chain, self.q - 1, self.ring)

    @property
    def f_keys(self) -> list:
        return self.fmod.keys

    def f_put(self, vec, n: int, b, lab, coef: int, pexp: int):
        self.fmod.put(vec, n, b, lab, coef, pexp)

    def f_zero(self):
        return self.fmod.zero()

    def f_relations(self) -> np.ndarray:
        """pi^(e-1) dpi = 0 and p d Omega_A^(q-2), as columns."""
        return self.fmod.relations()

    def f_inner(self) -> np.ndarray:
        return self.fmod.support(self.inner)

    def f_filtration(self, i: int) -> np.ndarray:
        return self.fmod.filtration(i)

    # psi and exp_p

    def psi_block_cocycles(self, modified: bool = True):
        """Cocycles of the modified complex in degree q-1 per orbit block, as (block terms, x-part)."""
        q = self.q
        ring, params = self.ring, self.params
        win = params.win * params.p**self.ext
        out = []
        for blk in L.orbit_blocks(params, self.chain, win=win):
            pts = blk.points
            X1 = L.make_term(params, pts, q - 1, "I", r=1)
            Y1 = L.make_term(params, pts, q - 2, "D")
            X2 = L.make_term(params, pts, q, "D")
            Y2 = L.make_term(params, pts, q - 1, "D")
            if len(X1) + len(Y1) == 0:
                continue
            dX = L.d_matrix(ring, params, X1, X2)
            one_f = (L.incl_matrix(ring, X1, Y2) - L.frob_matrix(ring, params, X1, Y2, q)) % ring.modulus
            dY = L.d_matrix(ring, params, Y1, Y2)
            top = np.concatenate([dX, ring.zeros(len(X2), len(Y1))], axis=1)
            bot = np.concatenate([one_f, (-dY) % ring.modulus], axis=1)
            Z = kernel(ring, np.concatenate([top, bot], axis=0))
            out.append((X1, Z[: len(X1), :]))
        return out

    def psi_matrix_on(self, X1: L.Term) -> np.ndarray:
        """x in I (x) Omega^(q-1) (I-lattice coordinates) -> proj_A(x) / p in F."""
        X = self.mbase
        proj = self.ring.zeros(len(self.f_keys), len(X1))
        for col, (key, c) in enumerate(zip(X1.keys, X1.exps)):
            m, b, lab = key
            v = self.f_zero()
            if X in lab:
                self.f_put(v, m - 1, b, lab, 1, c - 1)
            else:
                self.f_put(v, m, b, lab, 1, c - 1)
            proj[:, col] = v
        return proj

    def psi_image(self) -> np.ndarray:
        """psi(H^(q-1)) in F: images of all cocycles (boundaries land in the relations)."""
        cols = [self.ring.matmul(self.psi_matrix_on(X1), Z) for X1, Z in self.psi_block_cocycles()]
        return _cat(self.ring, len(self.f_keys), *cols)

    def s_prime_cocycles_psi(self) -> np.ndarray:
        """psi computed through S'(q) on the whole chain (a second, ungraded route)."""
        q, ring = self.q, self.ring
        X1 = self.iterm(q - 1, 1)
        gens_x = self.i_generators(q - 1, 1)
        dx = ring.matmul(self.d_matrix(q - 1), gens_x)
        one_f = (gens_x - self.fq_on_i(q - 1, 1, q)) % ring.modulus
        dy = self.d_matrix(q - 2) if q >= 2 else ring.zeros(len(self.dterm(q - 1)), 0)
        n2 = len(self.dterm(q))
        top = np.concatenate([dx, ring.zeros(n2, dy.shape[1])], axis=1)
        bot = np.concatenate([one_f, (-dy) % ring.modulus], axis=1)
        Z = kernel(ring, np.concatenate([top, bot], axis=0))
        return ring.matmul(self.psi_matrix_on(X1), Z[: len(X1), :])

    def exp_p_matrix(self) -> np.ndarray:
        """F -> S(q)^q = D (x) Omega^q + D (x) Omega^(q-1): omega -> (d(p w), (1 - f_q)(p w)).

        w is the monomial lift X^n T^b label of pi^n T^b label (dpi lifts to dX);
        this is delta applied to iso_one(omega).
        """
        q, ring, p, X = self.q, self.ring, self.params.p, self.mbase
        src = self.dterm(q - 1)
        lift = ring.zeros(len(src), len(self.f_keys))
        for col, (n, b, lab) in enumerate(self.f_keys):
            key = (n + 1 if X in lab else n, b, lab)
            row = src.index[key]
            # the D unit at these small X-degrees is X^m itself (exponent 0)
            assert src.exps[row] == 0
            lift[row, col] = p % ring.modulus
        top = ring.matmul(self.d_matrix(q - 1), lift)
        bot = (lift - self.fq_exact(lift.astype(object), q - 1, q)) % ring.modulus
        return np.concatenate([top, bot], axis=0)

    def s_boundaries(self) -> np.ndarray:
        """d(S(q)^(q-1)) inside S(q)^q, in D-coordinates."""
        q, ring = self.q, self.ring
        g_hi = self.j_generators(q - 1, 1, extra=True)
        g = self.to_work(g_hi)
        dx = ring.matmul(self.d_matrix(q - 1), g)
        one_f = (g - self.fq_exact(g_hi, q - 1, q)) % ring.modulus
        dy = self.d_matrix(q - 2) if q >= 2 else ring.zeros(len(self.dterm(q - 1)), 0)
        n2 = len(self.dterm(q))
        top = np.concatenate([dx, ring.zeros(n2, dy.shape[1])], axis=1)
        bot = np.concatenate([one_f, (-dy) % ring.modulus], axis=1)
        return np.concatenate([top, bot], axis=0) % ring.modulus

    def exp_p_kernel(self) -> np.ndarray:
        return preimage(self.ring, self.exp_p_matrix(), self.s_boundaries())

    def sq_denominator(self) -> np.ndarray:
        """dD (x) Omega^(q-2) + (1 - f_q) J (x) Omega^(q-1) in D (x) Omega^(q-1)."""
        q, ring = self.q, self.ring
        g_hi = self.j_generators(q - 1, 1, extra=True)
        one_f = (self.to_work(g_hi) - self.fq_exact(g_hi, q - 1, q)) % ring.modulus
        dy = self.d_matrix(q - 2) if q >= 2 else ring.zeros(len(self.dterm(q - 1)), 0)
        return _cat(ring, len(self.dterm(q - 1)), one_f, dy)


# --- complexes as FinComplex --------------------------------------------------------


def _check_q(params: TruncationParams, q: int):
    if q >= params.p:
        raise HypothesisError(f"q < p is required (got q={q}, p={params.p})")


def build_syntomic(ctx: ChainContext, q: int | None = None) -> FinComplex:
    """S(q) = MF(1 - f_q : J^[q] -> D) on one chain."""
    q = ctx.q if q is None else q
    _check_q(ctx.params, q)
    J, _ = ctx.j_complex(q)
    return mapping_fiber(ChainMap(J, ctx.d_complex(), ctx.one_minus_fq_j(q)))


def build_syntomic_prime(ctx: ChainContext, q: int | None = None) -> FinComplex:
    """S'(q) = MF(1 - f_q : I^[q] -> D)."""
    q = ctx.q if q is None else q
    _check_q(ctx.params, q)
    I, _ = ctx.i_complex(q)
    return mapping_fiber(ChainMap(I, ctx.d_complex(), ctx.one_minus_fq_i(q)))


def build_modified(ctx: ChainContext, q: int | None = None) -> FinComplex:
    """MF(1 - f_q : I^[q]_{>= q-2} -> D_{>= q-2})."""
    q = ctx.q if q is None else q
    _check_q(ctx.params, q)
    I, _ = ctx.i_complex(q)
    n = max(q - 2, 0)
    It, Dt = truncate_geq(I, n), truncate_geq(ctx.d_complex(), n)
    maps = [m if s >= n else ctx.ring.zeros(Dt.rank(s), It.rank(s)) for s, m in enumerate(ctx.one_minus_fq_i(q))]
    return mapping_fiber(ChainMap(It, Dt, maps))


def syntomic_inclusion(ctx: ChainContext, q: int | None = None) -> ChainMap:
    """The degreewise injective chain map S(q) -> S'(q) (J^[r] inside I^[r])."""
    q = ctx.q if q is None else q
    S_, Sp = build_syntomic(ctx, q), build_syntomic_prime(ctx, q)
    ring = ctx.ring
    maps = []
    for deg in range(S_.top + 1):
        # degree deg is J^[q-deg] (x) Omega^deg  +  D (x) Omega^(deg-1)
        jg = ctx.j_generators(deg, q - deg) if deg <= ctx.mbase + 1 else None
        a = 0 if jg is None else jg.shape[1]
        ia = len(ctx.iterm(deg, q - deg)) if deg <= ctx.mbase + 1 else 0
        m = ring.zeros(Sp.rank(deg), S_.rank(deg))
        if a:
            m[:ia, :a] = _i_coordinates(ctx, ctx.iterm(deg, q - deg), ctx.dterm(deg), jg)
        b = Sp.rank(deg) - ia
        if b:
            m[ia:, a:] = ring.identity(b)
        maps.append(m)
    return ChainMap(S_, Sp, maps)


def _i_coordinates(ctx: ChainContext, iterm: L.Term, dterm: L.Term, vecs_hi: np.ndarray) -> np.ndarray:
    """Coordinates in the (diagonal) I-lattice basis of exact D-coordinate columns.

    The I unit at a key is p^(c_I - c_D) times the D unit, so the division
    needs the extra digits carried by the high-precision columns.
    """
    ring, p = ctx.ring, ctx.params.p
    out = ring.zeros(len(iterm), vecs_hi.shape[1])
    for col, (key, c) in enumerate(zip(iterm.keys, iterm.exps)):
        row = dterm.index[key]
        k = c - dterm.exps[row]
        for j in range(vecs_hi.shape[1]):
            x = int(vecs_hi[row, j])
            if x % p**k:
                raise ArithmeticError("vector not in the I-lattice")
            out[col, j] = (x // p**k) % ring.modulus
    # rows of D outside the I-term must vanish
    covered = {dterm.index[k] for k in iterm.keys}
    for row in range(len(dterm)):
        if row not in covered and (vecs_hi[row, :] % ring.modulus).any():
            raise ArithmeticError("vector not in the I-lattice")
    return out


# --- whole-window drivers ----------------------------------------------------------


def chain_contexts(params: TruncationParams, ext: int = 1) -> list[ChainContext]:
    return [ChainContext(params, b, ext) for b in chain_bases(params)]


@dataclass
class ExactnessReport:
    base: tuple
    composite_zero: bool
    ker_length: int
    im_length: int
    spans_equal: bool

    @property
    def ok(self) -> bool:
        return self.composite_zero and self.ker_length == self.im_length and self.spans_equal


def _inner_part(ring: Ring, sub: np.ndarray, inner: np.ndarray, rel: np.ndarray) -> np.ndarray:
    n = sub.shape[0]
    return _cat(ring, n, intersection(ring, _cat(ring, n, sub, rel), inner), intersection(ring, rel, inner))


def sequence_exactness(ctx: ChainContext) -> ExactnessReport:
    """exp_p o psi = 0 and ker exp_p = im psi within the window (modulo relations)."""
    ring = ctx.ring
    rel = ctx.f_relations()
    psi = ctx.psi_image()
    Phi = ctx.exp_p_matrix()
    bnd = ctx.s_boundaries()
    composite_zero = contains(ring, bnd, ring.matmul(Phi, psi)) if psi.shape[1] else True
    K_exp = preimage(ring, Phi, bnd)
    K_psi = _cat(ring, len(ctx.f_keys), psi, rel)
    inner = ctx.f_inner()
    A = _inner_part(ring, K_exp, inner, rel)
    B = _inner_part(ring, K_psi, inner, rel)
    rel_in = intersection(ring, rel, inner)
    n = len(ctx.f_keys)
    ker_len = quotient_length(ring, A, _cat(ring, n, rel_in))
    im_len = quotient_length(ring, B, _cat(ring, n, rel_in))
    return ExactnessReport(ctx.base, composite_zero, ker_len, im_len, same_span(ring, A, B))


# --- symbols: U_X, E_q, s_q ---------------------------------------------------------


@dataclass(frozen=True)
class UXElem:
    """An element of U_X(D (x) Omega^(q-1)) with dlog labels and PDElem coefficients.

    witness records which generator family each coefficient came from:
    "X" for X D (x) Omega, "dX" for D (x) Omega^(q-2) ^ dX.
    """

    params: TruncationParams
    degree: int
    coeffs: dict = field(default_factory=dict)
    witness: dict = field(default_factory=dict)

    def series(self, x_trunc: int | None = None) -> S.SeriesForm:
        return S.SeriesForm(self.degree, {lab: S.from_pdelem(c, x_trunc) for lab, c in self.coeffs.items()})

    def check(self, x_trunc: int | None = None) -> bool:
        """Every coefficient lies in X D (as a series: positive X-order and D-integral)."""
        p, e = self.params.p, self.params.e
        for lab, c in self.coeffs.items():
            s = S.from_pdelem(c, x_trunc)
            if s.is_zero():
                continue
            if s.min_xdeg() == 0 or not S.in_d_lattice(s, p, e):
                return False
        return True


def random_uxelem(params: TruncationParams, rng: random.Random, q: int | None = None,
                  n_terms: int = 2, max_x: int = 4, max_t: int = 2, max_j: int = 2) -> UXElem:
    """Random element built from the generators X D (x) Omega^(q-1) and D (x) Omega^(q-2) ^ dX."""
    from .base_rings import BElem

    q = params.q if q is None else q
    m = params.m_pbase
    labs = L.labels(m, q - 1)
    coeffs: dict = {}
    witness: dict = {}
    for _ in range(n_terms):
        lab = rng.choice(labs)
        xdeg = rng.randint(1, max_x)
        tdeg = tuple(rng.randint(0, max_t) for _ in range(m))
        j = rng.randint(0, max_j)
        c = rng.randrange(1, params.p**params.n_prec)
        b = BElem.monomial(params, c, xdeg=xdeg, tdeg=tdeg)
        elem = PDElem(params, params.n_prec, {j: b})
        coeffs[lab] = coeffs[lab] + elem if lab in coeffs else elem
        witness[lab] = "dX" if m in lab else "X"
    return UXElem(params, q - 1, coeffs, witness)


@dataclass(frozen=True)
class SymbolExpr:
    """A formal symbol {a_1, ..., a_q}.

    Entries are ("E1", Series) for E_1 of a series, ("T", i) for T_(i+1),
    ("X",) for the uniformiser variable, or ("unit", Series) for a unit series.
    """

    entries: tuple

    def __str__(self):
        parts = []
        for ent in self.entries:
            if ent[0] == "E1":
                parts.append(f"E1({_short(ent[1])})")
            elif ent[0] == "T":
                parts.append(f"T{ent[1] + 1}")
            elif ent[0] == "X":
                parts.append("X")
            else:
                parts.append(_short(ent[1]))
        return "{" + ", ".join(parts) + "}"


def _short(s: S.Series) -> str:
    if s.is_zero():
        return "0"
    items = sorted(s.terms.items())
    out = []
    for (k, b), c in items[:4]:
        mono = "".join(f"T{i + 1}^{x}" if x != 1 else f"T{i + 1}" for i, x in enumerate(b) if x)
        xs = "" if k == 0 else ("X" if k == 1 else f"X^{k}")
        out.append(f"{c}" + ("*" + "*".join(t for t in (xs, mono) if t) if xs or mono else ""))
    if len(items) > 4:
        out.append("...")
    return " + ".join(out)


def _label_entries(lab: tuple, m: int) -> tuple:
    return tuple(("X",) if idx == m else ("T", idx) for idx in lab)


def E_q(x: UXElem, x_trunc: int | None = None) -> list[SymbolExpr]:
    """x dT_1/T_1 ^ ... ^ dT_(q-1)/T_(q-1) -> {E_1(x), T_1, ..., T_(q-1)}, summed over labels."""
    m = x.params.m_pbase
    out = []
    for lab, coef in sorted(x.coeffs.items()):
        s = S.from_pdelem(coef, x_trunc)
        if s.is_zero():
            continue
        out.append(SymbolExpr((("E1", s),) + _label_entries(lab, m)))
    return out


def artin_hasse_E1(x: PDElem, x_trunc: int | None = None) -> S.Series:
    """E_1(x) = exp(sum_n f_1^n(x)) as an exact series; x must have positive X-order."""
    return S.artin_hasse(S.from_pdelem(x, x_trunc), x.params.p)


def _entry_unit(ent, M: int, m: int, p: int):
    """(series of the lift, is_variable, dlog form)."""
    if ent[0] == "E1":
        u = S.artin_hasse(ent[1], p)
        return u, False
    if ent[0] == "unit":
        return ent[1], False
    return None, True


def s_q(symbols: list[SymbolExpr], params: TruncationParams, x_trunc: int | None = None) -> S.SeriesForm:
    """sum_i (-1)^(i-1) (1/p) log(f(a_i)/a_i^p) dlog a_1 ^ ... ^ f_1(dlog a_(i+1)) ^ ...

    Evaluated on exact series; variables T_i and X have f(T)/T^p = 1 and
    f_1(dT/T) = dT/T.
    """
    p, m = params.p, params.m_pbase
    M = params.x_trunc if x_trunc is None else x_trunc
    q = None
    total = None
    for sym in symbols:
        q = len(sym.entries)
        lifts = [_entry_unit(ent, M, m, p) for ent in sym.entries]
        dlogs, fdlogs = [], []
        for ent, (u, is_var) in zip(sym.entries, lifts):
            if is_var:
                idx = m if ent[0] == "X" else ent[1]
                w = S.dlog_label(M, m, idx)
                dlogs.append(w)
                fdlogs.append(w)
            else:
                w = S.dlog_series(u)
                dlogs.append(w)
                fdlogs.append(S.frobenius_form(w, p, 1))
        acc = S.SeriesForm(q - 1)
        for i, (u, is_var) in enumerate(lifts):
            if is_var:
                continue  # log(f(T) / T^p) = 0
            ratio = S.frobenius(u, p) * S.inverse(u**p)
            coef = S.log(ratio).scale(Fraction(1, p))
            form = S.scalar(coef)
            for k in range(q):
                if k == i:
                    continue
                form = S.wedge(form, dlogs[k] if k < i else fdlogs[k])
            acc = acc + form.scale((-1) ** i)
        total = acc if total is None else total + acc
    if total is None:
        return S.SeriesForm(0)
    return total


def sq_identity_defect(x: UXElem, x_trunc: int | None = None) -> S.SeriesForm:
    """s_q(E_q(x)) + x, which the identity s_q o E_q = -id says is zero in S^q."""
    return s_q(E_q(x, x_trunc), x.params, x_trunc) + x.series(x_trunc)


def series_form_coordinates(ctx: ChainContext, w: S.SeriesForm) -> np.ndarray:
    """D-lattice coordinates of a series form supported on this chain."""
    term = ctx.dterm(w.degree)
    ring, p = ctx.ring, ctx.params.p
    vec = ring.zeros(len(term), 1)[:, 0]
    for lab, s in w.terms.items():
        for (k, b), c in s.terms.items():
            row = term.index.get((k, b, lab))
            if row is None:
                if b in ctx.chain and k < ctx.params.x_trunc:
                    raise ArithmeticError(f"term X^{k} T^{b} {lab} is not in D (x) Omega")
                continue
            val = c / Fraction(p) ** term.exps[row]
            if val.denominator % p == 0:
                raise ArithmeticError("form is not in the D-lattice")
            vec[row] = (int(vec[row]) + val.numerator * pow(val.denominator, -1, ring.modulus)) % ring.modulus
    return vec


def in_sq_denominator(params: TruncationParams, w: S.SeriesForm, ext: int = 1) -> bool:
    """Membership of a series form in (dD (x) Omega^(q-2) + (1 - f_q) J (x) Omega^(q-1))."""
    if w.is_zero():
        return True
    bases = set()
    for s in w.terms.values():
        for (_k, b) in s.terms:
            bases.add(chain_of(params, b))
    for base in sorted(bases):
        ctx = ChainContext(params, base, ext)
        vec = series_form_coordinates(ctx, w)
        if not vec.any():
            continue
        if not contains(ctx.ring, ctx.sq_denominator(), vec.reshape(-1, 1)):
            return False
    return True


def class_map(ctx: ChainContext, x: UXElem) -> tuple[np.ndarray, np.ndarray]:
    """x -> (sum_n f_q^n(dx), x) in S(q)^q, in D-coordinates on this chain."""
    q, p = ctx.q, ctx.params.p
    M = ctx.params.x_trunc
    xs = x.series(M)
    dx = S.SeriesForm(q, {})
    for lab, c in xs.terms.items():
        dx = dx + S.wedge(S.d_series(c), S.SeriesForm(q - 1, {lab: S.Series.const(M, ctx.mbase)}))
    total, term, n = dx, dx, 0
    while not term.is_zero():
        term = S.frobenius_form(term, p, q)
        total = total + term
        n += 1
        if n > M:
            raise ArithmeticError("iterate cap exceeded")
    return series_form_coordinates(ctx, total), series_form_coordinates(ctx, xs)


def class_map_is_cocycle(ctx: ChainContext, x: UXElem) -> bool:
    """d_S(a, y) = (da, (1 - f_q) a - dy) vanishes for (a, y) = class_map(x)."""
    ring, q = ctx.ring, ctx.q
    a, y = class_map(ctx, x)
    da = ring.matmul(ctx.d_matrix(q), a.reshape(-1, 1))
    fa = ctx.fq_exact(a.reshape(-1, 1).astype(object), q, q)
    dy = ring.matmul(ctx.d_matrix(q - 1), y.reshape(-1, 1))
    second = (a.reshape(-1, 1) - fa - dy) % ring.modulus
    return not da.any() and not second.any()


# --- iso_one and its inverse ------------------------------------------------------


def iso_one(ctx: ChainContext, f_vec: np.ndarray) -> np.ndarray:
    """omega in F -> p * (monomial lift) in D (x) Omega^(q-1) coordinates."""
    ring, X = ctx.ring, ctx.mbase
    src = ctx.dterm(ctx.q - 1)
    out = ring.zeros(len(src), 1)[:, 0]
    for i, (n, b, lab) in enumerate(ctx.f_keys):
        c = int(f_vec[i])
        if c:
            row = src.index[(n + 1 if X in lab else n, b, lab)]
            out[row] = (int(out[row]) + c * ctx.params.p) % ring.modulus
    return out


def iso_one_inverse(ctx: ChainContext, d_vec: np.ndarray) -> np.ndarray:
    """x in I (x) Omega^(q-1) (D-coordinates) -> proj_A(x) / p in F."""
    ring, X, p = ctx.ring, ctx.mbase, ctx.params.p
    src = ctx.dterm(ctx.q - 1)
    out = ctx.f_zero()
    for row in np.nonzero(d_vec)[0]:
        (m, b, lab), c = src.keys[row], src.exps[row]
        coef = int(d_vec[row])
        v = 0
        while coef % p == 0 and v < ring.prec:
            coef //= p
            v += 1
        if X in lab:
            ctx.f_put(out, m - 1, b, lab, coef, c + v - 1)
        else:
            ctx.f_put(out, m, b, lab, coef, c + v - 1)
    return out

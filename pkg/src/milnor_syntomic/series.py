"""Exact rational power series in X and Laurent series in T, truncated in X.

Used for the Artin-Hasse exponential E_1 and the symbol map s_q, where exp and
log are applied to series without constant term.  Coefficients are Fractions,
so no p-adic precision is lost; the X-truncation makes every series finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, gcd

from .base_rings import AElem, BElem
from .lattice import vp_factorial
from .linalg import valuation
from .params import TruncationParams


class SeriesError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Series:
    """{(xdeg, tdeg): Fraction}, X-degrees below x_trunc."""

    x_trunc: int
    m: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (k, b), c in self.terms.items():
            if k < self.x_trunc and c != 0:
                clean[(k, tuple(b))] = Fraction(c)
        object.__setattr__(self, "terms", clean)

    @classmethod
    def const(cls, x_trunc: int, m: int, c=1) -> "Series":
        return cls(x_trunc, m, {(0, (0,) * m): c})

    @classmethod
    def mono(cls, x_trunc: int, m: int, c, xdeg: int = 0, tdeg=None) -> "Series":
        tdeg = (0,) * m if tdeg is None else tuple(tdeg)
        return cls(x_trunc, m, {(xdeg, tdeg): c})

    def _new(self, terms):
        return Series(self.x_trunc, self.m, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, Series) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "Series") -> "Series":
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, 0) + c
        return self._new(out)

    def __neg__(self):
        return self._new({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Series":
        return self._new({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Series):
            return self.scale(other)
        if not self.terms or not other.terms:
            return self._new({})
        # integer numerators over a common denominator; Fractions only at the end
        da, na = _common(self.terms)
        db, nb = _common(other.terms)
        nb.sort(key=lambda t: t[0])
        M = self.x_trunc
        acc: dict = {}
        for k1, b1, c1 in na:
            for k2, b2, c2 in nb:
                k = k1 + k2
                if k >= M:
                    break
                mono = (k, tuple(x + y for x, y in zip(b1, b2)))
                acc[mono] = acc.get(mono, 0) + c1 * c2
        den = da * db
        return self._new({mono: Fraction(c, den) for mono, c in acc.items() if c})

    def __pow__(self, n: int) -> "Series":
        result = Series.const(self.x_trunc, self.m)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def min_xdeg(self) -> int | None:
        return min((k for k, _ in self.terms), default=None)

    def constant_term(self) -> Fraction:
        return self.terms.get((0, (0,) * self.m), Fraction(0))

    def min_valuation(self, p: int) -> int | None:
        vals = [valuation(c.numerator, p) - valuation(c.denominator, p) for c in self.terms.values()]
        return min(vals, default=None)

    def __repr__(self):
        if not self.terms:
            return "Series(0)"
        parts = [f"{c}*X^{k}*T^{b}" for (k, b), c in sorted(self.terms.items())]
        return "Series(" + " + ".join(parts) + ")"


def _common(terms: dict) -> tuple[int, list]:
    den = 1
    for c in terms.values():
        den = den * c.denominator // gcd(den, c.denominator)
    return den, [(k, b, c.numerator * (den // c.denominator)) for (k, b), c in terms.items()]


def from_belem(x: BElem, x_trunc: int | None = None) -> Series:
    """Lift integer representatives of the Z/p^N coefficients."""
    M = x.params.x_trunc if x_trunc is None else x_trunc
    return Series(M, x.params.m_pbase, {mono: c for mono, c in x.terms.items()})


def from_pdelem(x, x_trunc: int | None = None) -> Series:
    """sum_j b_j u^[j] with u^[j] = (X^e - p)^j / j! expanded exactly."""
    params = x.params
    M = params.x_trunc if x_trunc is None else x_trunc
    m, e, p = params.m_pbase, params.e, params.p
    u = Series(M, m, {(e, (0,) * m): 1, (0, (0,) * m): -p})
    out = Series(M, m)
    for j, b in x.coeffs.items():
        out = out + from_belem(b, M) * (u**j).scale(Fraction(1, factorial(j)))
    return out


def frobenius(s: Series, p: int) -> Series:
    """X -> X^p, T -> T^p, identity on coefficients."""
    return s._new({(k * p, tuple(p * x for x in b)): c for (k, b), c in s.terms.items()})


def exp(z: Series) -> Series:
    """exp of a series with positive X-order; terminates by X-degree."""
    if z.is_zero():
        return Series.const(z.x_trunc, z.m)
    if z.min_xdeg() == 0:
        raise SeriesError("exp needs a series without X-constant part")
    out = Series.const(z.x_trunc, z.m)
    term = Series.const(z.x_trunc, z.m)
    n = 1
    while True:
        term = (term * z).scale(Fraction(1, n))
        if term.is_zero():
            return out
        out = out + term
        n += 1


def log1p(z: Series) -> Series:
    """log(1 + z) for z of positive X-order."""
    if z.is_zero():
        return z
    if z.min_xdeg() == 0:
        raise SeriesError("log needs 1 + (positive X-order)")
    out = Series(z.x_trunc, z.m)
    power = Series.const(z.x_trunc, z.m)
    n = 1
    while True:
        power = power * z
        if power.is_zero():
            return out
        out = out + power.scale(Fraction((-1) ** (n + 1), n))
        n += 1


def log(u: Series) -> Series:
    one = Series.const(u.x_trunc, u.m)
    if u.constant_term() != 1:
        raise SeriesError("log needs a unit with constant term 1")
    return log1p(u - one)


def inverse(u: Series) -> Series:
    """1 / u for u = 1 + (positive X-order)."""
    one = Series.const(u.x_trunc, u.m)
    if u.constant_term() != 1:
        raise SeriesError("inverse needs constant term 1")
    z = u - one
    if z.is_zero():
        return one
    if z.min_xdeg() == 0:
        raise SeriesError("inverse needs 1 + (positive X-order)")
    out, power, sign = one, one, 1
    while True:
        power = power * z
        sign = -sign
        if power.is_zero():
            return out
        out = out + power.scale(sign)


def divided_frobenius_sum(x: Series, p: int, q: int = 1, cap: int | None = None) -> Series:
    """sum_{n >= 0} f_q^n(x) with f_q = f / p^q on coefficients; needs x of positive X-order."""
    if x.is_zero():
        return x
    if x.min_xdeg() == 0:
        raise SeriesError("the f_q-sum only converges on positive X-order")
    out, term, n = x, x, 0
    cap = x.x_trunc if cap is None else cap
    while True:
        term = frobenius(term, p).scale(Fraction(1, p**q))
        if term.is_zero():
            return out
        out = out + term
        n += 1
        if n > cap:
            raise SeriesError("iterate cap exceeded")


def artin_hasse(x: Series, p: int) -> Series:
    """E_1(x) = exp(sum_n f_1^n(x))."""
    return exp(divided_frobenius_sum(x, p, 1))


def to_aelem(s: Series, params: TruncationParams, prec: int | None = None) -> AElem:
    """Image under X -> pi; the coefficient of X^k becomes c p^(k // e) pi^(k % e)."""
    prec = params.n_prec if prec is None else prec
    p, e = params.p, params.e
    mod = p**prec
    terms: dict = {}
    for (k, b), c in s.terms.items():
        scaled = c * Fraction(p) ** (k // e)
        if scaled.denominator % p == 0:
            raise SeriesError(f"coefficient {c} of X^{k} is not integral on A")
        val = scaled.numerator * pow(scaled.denominator, -1, mod) % mod
        mono = (k % e, b)
        terms[mono] = (terms.get(mono, 0) + val) % mod
    return AElem(params, prec, terms)


def in_d_lattice(s: Series, p: int, e: int) -> bool:
    """All coefficients of X^k have valuation >= -v_p(floor(k/e)!), i.e. s lies in D."""
    for (k, _b), c in s.terms.items():
        v = valuation(c.numerator, p) - valuation(c.denominator, p)
        if v < -vp_factorial(k // e, p):
            return False
    return True


# --- forms with series coefficients, dlog basis ---------------------------------


@dataclass(frozen=True)
class SeriesForm:
    """{label: Series}; label index i < m is dT_i/T_i, index m is dX/X."""

    degree: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {tuple(lab): c for lab, c in self.terms.items() if not c.is_zero()}
        object.__setattr__(self, "terms", clean)

    def __add__(self, other):
        out = dict(self.terms)
        for lab, c in other.terms.items():
            out[lab] = out[lab] + c if lab in out else c
        return SeriesForm(self.degree, out)

    def __neg__(self):
        return SeriesForm(self.degree, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return SeriesForm(self.degree, {k: v * c for k, v in self.terms.items()})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, SeriesForm) and self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.degree, frozenset(self.terms.items())))


def _merge(a: tuple, b: tuple):
    if set(a) & set(b):
        return None
    seq = list(a) + list(b)
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return (-1) ** inv, tuple(sorted(seq))


def wedge(a: SeriesForm, b: SeriesForm) -> SeriesForm:
    out: dict = {}
    for la, ca in a.terms.items():
        for lb, cb in b.terms.items():
            mg = _merge(la, lb)
            if mg is None:
                continue
            sign, lab = mg
            term = (ca * cb).scale(sign)
            out[lab] = out[lab] + term if lab in out else term
    return SeriesForm(a.degree + b.degree, out)


def scalar(s: Series) -> SeriesForm:
    return SeriesForm(0, {(): s})


def dlog_label(x_trunc: int, m: int, index: int) -> SeriesForm:
    return SeriesForm(1, {(index,): Series.const(x_trunc, m)})


def d_series(s: Series) -> SeriesForm:
    """ds in the dlog basis: d(X^k T^b) = X^k T^b (k dX/X + sum b_i dT_i/T_i)."""
    out: dict = {}
    for (k, b), c in s.terms.items():
        weights = list(b) + [k]
        for idx, w in enumerate(weights):
            if w:
                out.setdefault((idx,), {})
                out[(idx,)][(k, b)] = out[(idx,)].get((k, b), 0) + c * w
    return SeriesForm(1, {lab: Series(s.x_trunc, s.m, t) for lab, t in out.items()})


def dlog_series(u: Series) -> SeriesForm:
    """du / u for a unit with constant term 1."""
    inv = inverse(u)
    return SeriesForm(1, {lab: c * inv for lab, c in d_series(u).terms.items()})


def frobenius_form(w: SeriesForm, p: int, q: int) -> SeriesForm:
    """f_q on forms in the dlog basis: each label contributes p."""
    return SeriesForm(w.degree, {lab: frobenius(c, p).scale(Fraction(p) ** (len(lab) - q))
                                 for lab, c in w.terms.items()})

"""Truncated models of k, A_0, B = A_0[[X]] and A = B/(X^e - p).

Every element is a sparse table {(X-degree, T-multidegree): coefficient} with
coefficients reduced mod p^prec.  LaurentElem only uses X-degree 0, AElem keeps
X-degree below e (X is the uniformiser pi with pi^e = p).  A LaurentElem with
prec=1 is the model of the residue field k.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .params import TruncationParams


class TruncationError(ArithmeticError):
    """Raised in strict mode when a nonzero term falls outside the truncation."""


Mono = tuple  # (xdeg, (b_1, ..., b_m))


@dataclass(frozen=True)
class _Sparse:
    params: TruncationParams
    prec: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        mod = self.params.p**self.prec
        clean = {}
        for mono, c in self.terms.items():
            c %= mod
            if c and self._keep(mono, c):
                clean[mono] = c
        object.__setattr__(self, "terms", clean)

    # subclasses restrict X-degrees further
    def _x_bound(self) -> int:
        return self.params.x_trunc

    def _keep(self, mono, c) -> bool:
        k, b = mono
        ok = 0 <= k < self._x_bound() and all(abs(x) <= self.params.win for x in b)
        if not ok and self.params.strict:
            raise TruncationError(f"term {mono} dropped by truncation")
        return ok

    @property
    def modulus(self) -> int:
        return self.params.p**self.prec

    def _new(self, terms):
        return type(self)(self.params, self.prec, terms)

    @classmethod
    def zero(cls, params, prec=None):
        return cls(params, params.n_prec if prec is None else prec, {})

    @classmethod
    def one(cls, params, prec=None):
        return cls.constant(params, 1, prec)

    @classmethod
    def constant(cls, params, c, prec=None):
        return cls(params, params.n_prec if prec is None else prec, {(0, (0,) * params.m_pbase): c})

    @classmethod
    def monomial(cls, params, c, xdeg=0, tdeg=None, prec=None):
        tdeg = (0,) * params.m_pbase if tdeg is None else tuple(tdeg)
        return cls(params, params.n_prec if prec is None else prec, {(xdeg, tdeg): c})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.constant(self.params, other, self.prec)
        return type(self) is type(other) and self.prec == other.prec and self.terms == other.terms

    def __hash__(self):
        return hash((type(self).__name__, self.prec, frozenset(self.terms.items())))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, 0) + c
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({mono: -c for mono, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def _coerce(self, other):
        if isinstance(other, int):
            return self.constant(self.params, other, self.prec)
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        return other

    def _raw_mul(self, other) -> dict:
        out: dict = {}
        for (k1, b1), c1 in self.terms.items():
            for (k2, b2), c2 in other.terms.items():
                mono = (k1 + k2, tuple(x + y for x, y in zip(b1, b2)))
                out[mono] = out.get(mono, 0) + c1 * c2
        return out

    def __mul__(self, other):
        if isinstance(other, int):
            return self._new({mono: c * other for mono, c in self.terms.items()})
        other = self._coerce(other)
        return self._new(self._raw_mul(other))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = self.one(self.params, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale_exact(self, denom: int):
        """Divide every coefficient by denom, which must divide it as an integer."""
        out = {}
        for mono, c in self.terms.items():
            if c % denom:
                raise ArithmeticError(f"coefficient {c} not divisible by {denom}")
            out[mono] = c // denom
        return self._new(out)

    def with_prec(self, prec: int):
        return type(self)(self.params, prec, dict(self.terms))

    def __repr__(self):
        if not self.terms:
            return f"{type(self).__name__}(0)"
        parts = []
        for (k, b), c in sorted(self.terms.items()):
            mono = "".join(f"*T{i + 1}^{x}" for i, x in enumerate(b) if x)
            if k:
                mono += f"*X^{k}"
            parts.append(f"{c}{mono}")
        return f"{type(self).__name__}({' + '.join(parts)})"


class LaurentElem(_Sparse):
    """Element of A_0 (or of k when prec == 1): X-degree always 0."""

    def _x_bound(self) -> int:
        return 1


class BElem(_Sparse):
    """Element of B = A_0[[X]] truncated at X-degree x_trunc."""

    @classmethod
    def X(cls, params, prec=None):
        return cls.monomial(params, 1, xdeg=1, prec=prec)

    @classmethod
    def T(cls, params, i: int, power: int = 1, prec=None):
        tdeg = [0] * params.m_pbase
        tdeg[i] = power
        return cls.monomial(params, 1, tdeg=tdeg, prec=prec)

    @classmethod
    def from_laurent(cls, a: LaurentElem):
        return cls(a.params, a.prec, dict(a.terms))

    def x_coefficients(self) -> dict:
        """X-exponent -> LaurentElem."""
        out: dict = {}
        for (k, b), c in self.terms.items():
            out.setdefault(k, {})[(0, b)] = c
        return {k: LaurentElem(self.params, self.prec, t) for k, t in sorted(out.items())}


class AElem(_Sparse):
    """Element of A = O_K with uniformiser pi, pi^e = p; X-degree < e."""

    def _x_bound(self) -> int:
        return self.params.e

    def __post_init__(self):
        # rewrite pi^k, k >= e, as p^(k // e) pi^(k % e) before truncating
        e, p = self.params.e, self.params.p
        red: dict = {}
        for (k, b), c in self.terms.items():
            mono = (k % e, b)
            red[mono] = red.get(mono, 0) + c * p ** (k // e)
        object.__setattr__(self, "terms", red)
        super().__post_init__()

    @classmethod
    def pi(cls, params, prec=None):
        return cls.monomial(params, 1, xdeg=1, prec=prec)

    def __mul__(self, other):
        if isinstance(other, int):
            return self._new({mono: c * other for mono, c in self.terms.items()})
        other = self._coerce(other)
        return self._new(self._raw_mul(other))

    __rmul__ = __mul__

    def pi_valuation(self) -> int | None:
        """Largest v with self in pi^v A (None for zero), up to precision."""
        if not self.terms:
            return None
        p, e = self.params.p, self.params.e
        best = None
        for (k, _b), c in self.terms.items():
            vp = 0
            while c % p == 0:
                c //= p
                vp += 1
            v = e * vp + k
            best = v if best is None else min(best, v)
        return best


def frobenius(x: BElem) -> BElem:
    """The Frobenius lift T_i -> T_i^p, X -> X^p, identity on Z/p^N."""
    p = x.params.p
    terms: dict = {}
    for (k, b), c in x.terms.items():
        mono = (k * p, tuple(p * t for t in b))
        terms[mono] = terms.get(mono, 0) + c
    return type(x)(x.params, x.prec, terms)


def project_to_A(b: BElem) -> AElem:
    """X -> pi, i.e. reduce modulo the ideal (X^e - p)."""
    return AElem(b.params, b.prec, dict(b.terms))


def ideal_J_generators(params: TruncationParams, prec=None) -> list[BElem]:
    """Generators of ker(B -> A): the single element X^e - p."""
    Xe = BElem.monomial(params, 1, xdeg=params.e, prec=prec)
    return [Xe - params.p]


def ideal_Jtilde_generators(params: TruncationParams, prec=None) -> list[BElem]:
    """Generators of ker(B -> A/p) = J + pB."""
    return ideal_J_generators(params, prec) + [BElem.constant(params, params.p, prec)]


def random_belem(params: TruncationParams, rng: random.Random, n_terms: int = 4,
                 prec=None, max_x=None, max_t=None) -> BElem:
    prec = params.n_prec if prec is None else prec
    max_x = params.x_trunc - 1 if max_x is None else max_x
    max_t = params.win if max_t is None else max_t
    terms = {}
    for _ in range(n_terms):
        k = rng.randint(0, max_x)
        b = tuple(rng.randint(-max_t, max_t) for _ in range(params.m_pbase))
        terms[(k, b)] = rng.randrange(params.p**prec)
    return BElem(params, prec, terms)

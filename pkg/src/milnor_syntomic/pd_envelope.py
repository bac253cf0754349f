"""The truncated PD-envelope D of B -> A and the divided Frobenius.

Since ker(B -> A) = (u) with u = X^e - p is principal, D is generated over B by
the divided powers u^[j] = u^j / j!.  A PDElem is {j: BElem} meaning
sum_j b_j u^[j], with j <= pd_level.

Forms over D use dlog labels: index i < m is dT_i/T_i and index m is dX/X.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from .base_rings import BElem, TruncationError, frobenius
from .lattice import vp_factorial
from .params import TruncationParams


class InexactDivision(ArithmeticError):
    """Raised when a division by p^k is not exact: a membership precondition failed."""


def divided_p_power(j: int, p: int) -> Fraction:
    """The scalar p^<j> = p^j / j!, which lies in Z_(p)."""
    return Fraction(p**j, factorial(j))


def zp_residue(x: Fraction, modulus: int) -> int:
    """Image of a p-integral rational in Z/modulus."""
    den = x.denominator
    return (x.numerator * pow(den, -1, modulus)) % modulus


@dataclass(frozen=True)
class PDElem:
    params: TruncationParams
    prec: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for j, b in self.coeffs.items():
            if j > self.params.pd_level:
                if not b.is_zero() and self.params.strict:
                    raise TruncationError(f"u^[{j}] exceeds the PD level")
                continue
            if j < 0:
                raise ValueError("negative divided-power index")
            if b.prec != self.prec:
                b = b.with_prec(self.prec)
            if not b.is_zero():
                clean[j] = b
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def from_b(cls, b: BElem) -> "PDElem":
        return cls(b.params, b.prec, {0: b})

    @classmethod
    def u_power(cls, params, j: int, prec=None) -> "PDElem":
        prec = params.n_prec if prec is None else prec
        return cls(params, prec, {j: BElem.one(params, prec)})

    @classmethod
    def zero(cls, params, prec=None):
        return cls(params, params.n_prec if prec is None else prec, {})

    @classmethod
    def one(cls, params, prec=None):
        return cls.u_power(params, 0, prec)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, PDElem) and self.prec == other.prec and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.prec, frozenset(self.coeffs.items())))

    def __add__(self, other: "PDElem") -> "PDElem":
        out = dict(self.coeffs)
        for j, b in other.coeffs.items():
            out[j] = out[j] + b if j in out else b
        return PDElem(self.params, self.prec, out)

    def __neg__(self):
        return PDElem(self.params, self.prec, {j: -b for j, b in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "PDElem":
        """Multiply by an integer or a BElem."""
        return PDElem(self.params, self.prec, {j: b * c for j, b in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, PDElem):
            return self.scale(other)
        return pd_mul(self, other)

    def scale_exact(self, denom: int) -> "PDElem":
        try:
            return PDElem(self.params, self.prec, {j: b.scale_exact(denom) for j, b in self.coeffs.items()})
        except ArithmeticError as exc:
            raise InexactDivision(str(exc)) from None

    def with_prec(self, prec: int) -> "PDElem":
        return PDElem(self.params, prec, {j: b.with_prec(prec) for j, b in self.coeffs.items()})

    def __repr__(self):
        return f"PDElem({ {j: b for j, b in sorted(self.coeffs.items())} })"

    def to_json(self) -> list:
        return [[j, [[k, list(t), c] for (k, t), c in sorted(b.terms.items())]] for j, b in sorted(self.coeffs.items())]

    @classmethod
    def from_json(cls, data, params, prec) -> "PDElem":
        return cls(params, prec, {j: BElem(params, prec, {(k, tuple(t)): c for k, t, c in terms}) for j, terms in data})


def pd_mul(a: PDElem, b: PDElem) -> PDElem:
    """Bilinear extension of u^[i] u^[j] = binom(i+j, i) u^[i+j]."""
    out: dict = {}
    for i, x in a.coeffs.items():
        for j, y in b.coeffs.items():
            if i + j > a.params.pd_level:
                prod = x * y
                if not prod.is_zero() and a.params.strict:
                    raise TruncationError(f"u^[{i + j}] exceeds the PD level")
                continue
            term = (x * y) * comb(i + j, i)
            out[i + j] = out[i + j] + term if i + j in out else term
    return PDElem(a.params, a.prec, out)


def pd_power(x: PDElem, n: int) -> PDElem:
    result = PDElem.one(x.params, x.prec)
    for _ in range(n):
        result = pd_mul(result, x)
    return result


# --- ideals ---------------------------------------------------------------


@dataclass(frozen=True)
class PDIdealSpec:
    kind: str  # "J", "I", "J[r]", "I[r]"
    r: int = 1

    def __post_init__(self):
        if self.kind not in ("J", "I", "J[r]", "I[r]"):
            raise ValueError(f"unknown ideal kind {self.kind}")

    @property
    def level(self) -> int:
        return 1 if self.kind in ("J", "I") else self.r

    @property
    def family(self) -> str:
        return self.kind[0]


def ideal_generators(params: TruncationParams, spec: PDIdealSpec, prec=None) -> list[PDElem]:
    """A finite generating set of J^[r] or I^[r] at truncation."""
    prec = params.n_prec if prec is None else prec
    r = spec.level
    L = params.pd_level
    if r > L:
        raise ValueError(f"r={r} exceeds the PD level {L}")
    if r <= 0:
        return [PDElem.one(params, prec)]
    mod = params.p**prec
    gens = []
    if spec.family == "J":
        for j in range(r, L + 1):
            gens.append(PDElem.u_power(params, j, prec))
        return gens
    p = params.p
    lmax = params.n_prec * (p - 1) // (p - 2) + 1
    for i in range(0, L + 1):
        for l in range(max(r - i, 0), lmax + 1):
            scalar = zp_residue(divided_p_power(l, p), mod)
            if scalar == 0:
                continue
            gens.append(PDElem(params, prec, {i: BElem.constant(params, scalar, prec)}))
            break  # higher l only give multiples (v_p(p^l/l!) is non-decreasing)
    return gens


# --- Frobenius on D -------------------------------------------------------


def _frob_u(params: TruncationParams, prec: int) -> tuple[PDElem, PDElem]:
    """(v, p! u^[p]) with f(u) = (u + p)^p - p = p v + p! u^[p]."""
    p = params.p
    # (u+p)^p - p = sum_{i>=1} binom(p,i) p^(p-i) u^i + p^p - p, and u^i = i! u^[i]
    v = {0: BElem.constant(params, (p**p - p) // p, prec)}
    for i in range(1, p):
        c = comb(p, i) * p ** (p - i) * factorial(i)
        v[i] = BElem.constant(params, c // p, prec)
    top = {p: BElem.constant(params, factorial(p), prec)}
    return PDElem(params, prec, v), PDElem(params, prec, top)


def _frob_u_divided(params: TruncationParams, j: int, prec: int) -> PDElem:
    """f(u^[j]) = (p v + p! u^[p])^[j] = sum_k (pk)!/k! u^[pk] * p^<j-k> v^(j-k)."""
    p = params.p
    mod = p**prec
    v, _ = _frob_u(params, prec)
    out = PDElem.zero(params, prec)
    for k in range(0, j + 1):
        top_coef = factorial(p * k) // factorial(k)
        if p * k > params.pd_level:
            continue
        scalar = zp_residue(divided_p_power(j - k, p) * top_coef, mod)
        if scalar == 0:
            continue
        term = pd_mul(PDElem.u_power(params, p * k, prec), pd_power(v, j - k)).scale(scalar)
        out = out + term
    return out


def frobenius_D(x: PDElem) -> PDElem:
    """Extension of the Frobenius lift to D: f(b u^[j]) = f(b) f(u)^[j]."""
    out = PDElem.zero(x.params, x.prec)
    for j, b in x.coeffs.items():
        fb = frobenius(b)
        out = out + _frob_u_divided(x.params, j, x.prec).scale(fb)
    return out


# --- forms over D and the divided Frobenius --------------------------------


@dataclass(frozen=True)
class PDForm:
    """sum over dlog labels of PDElem coefficients; index m is dX/X."""

    degree: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {tuple(lab): c for lab, c in self.terms.items() if not c.is_zero()}
        for lab in clean:
            if len(lab) != self.degree:
                raise ValueError("label degree mismatch")
        object.__setattr__(self, "terms", clean)

    def __add__(self, other):
        out = dict(self.terms)
        for lab, c in other.terms.items():
            out[lab] = out[lab] + c if lab in out else c
        return PDForm(self.degree, out)

    def __neg__(self):
        return PDForm(self.degree, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, PDForm) and self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.degree, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms


def in_ideal_level(x: PDElem, r: int) -> bool:
    """x in J^[r] when written in the u^[j] basis with B-coefficients (j >= r only)."""
    return all(j >= r for j in x.coeffs)


def divided_frobenius(x: PDForm, r: int, s: int, out_prec: int | None = None) -> PDForm:
    """f_q = f / p^q on J^[r] (x) Omega^s with q = r + s, for 0 <= r < p.

    Each dlog label picks up p^s from f(dT/T) = p dT/T; the remaining p^r must
    divide the Frobenius image of the J^[r] coefficient exactly.
    """
    if x.is_zero():
        return x
    some = next(iter(x.terms.values()))
    params = some.params
    p = params.p
    if not 0 <= r < p:
        raise ValueError(f"f_q is only defined for 0 <= r < p (got r={r})")
    if x.degree != s:
        raise ValueError("form degree does not match s")
    q = r + s
    out = {}
    for lab, coef in x.terms.items():
        if not in_ideal_level(coef, r):
            raise InexactDivision(f"coefficient of {lab} is not in J^[{r}]")
        fc = frobenius_D(coef)
        # p^s from the labels and the division by p^q leave an exact division by p^r
        fc = fc.scale_exact(p**r)
        prec = some.prec - r if out_prec is None else out_prec
        out[lab] = fc.with_prec(prec)
    return PDForm(s, out)


# --- conversion to the lattice basis w_k = X^k / floor(k/e)! ----------------


def w_coordinates(x: PDElem) -> dict:
    """{(k, tdeg): integer} with x = sum c * w_k T^tdeg, exact before reduction.

    u^[j] = sum_i (-p)^<j-i> X^(e i) / i!, and X^n X^(e i) / i! equals
    w_(n + e i) times the integer floor((n + e i)/e)! / i!.
    """
    params = x.params
    e, p = params.e, params.p
    mod = p**x.prec
    out: dict = {}
    for j, b in x.coeffs.items():
        for (n, t), c in b.terms.items():
            for i in range(j + 1):
                scal = divided_p_power(j - i, p) * (-1) ** (j - i)
                k = n + e * i
                if k >= params.x_trunc:
                    continue
                ratio = factorial(k // e) // factorial(i)
                val = zp_residue(scal * ratio * c, mod)
                out[(k, t)] = (out.get((k, t), 0) + val) % mod
    return {key: c for key, c in out.items() if c}


def w_valuation_shift(params: TruncationParams, k: int) -> int:
    """v_p(floor(k/e)!): w_k = X^k p^(-shift) up to a unit."""
    return vp_factorial(k // params.e, params.p)

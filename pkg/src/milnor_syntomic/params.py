"""The global truncation context."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields


class HypothesisError(ValueError):
    """A parameter set violates a standing hypothesis; the message names it."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, math.isqrt(n) + 1))


@dataclass(frozen=True)
class TruncationParams:
    """Finite-precision context shared by every model.

    p        odd prime
    e        absolute ramification index, p does not divide e
    q        K-theory degree, q < p
    n_prec   p-adic precision N of reported results
    x_trunc  X-degrees >= x_trunc are dropped
    pd_level divided powers u^[j] are kept for j <= pd_level
    m_pbase  number of p-base variables T_1..T_m
    win      Laurent exponents are kept in [-win, win]
    """

    p: int = 5
    e: int = 2
    q: int = 2
    n_prec: int = 3
    x_trunc: int = 30
    pd_level: int = 6
    m_pbase: int = 1
    win: int = 25
    strict: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not is_prime(self.p) or self.p < 3:
            raise HypothesisError(f"p must be an odd prime (got p={self.p})")
        if self.e < 1:
            raise HypothesisError("e must be a positive integer")
        if self.e % self.p == 0:
            raise HypothesisError(f"p ∤ e is required (got p={self.p}, e={self.e})")
        if not 1 <= self.q < self.p:
            raise HypothesisError(f"q < p is required (got q={self.q}, p={self.p})")
        if self.n_prec < 1:
            raise HypothesisError("N >= 1 is required")
        if self.x_trunc < self.e * (self.pd_level + 1):
            raise HypothesisError("M >= e(L+1) is required")
        if self.m_pbase < 0:
            raise HypothesisError("m_pbase must be non-negative")
        if self.m_pbase and self.win < self.p**2:
            raise HypothesisError("W >= p^2 is required")

    @property
    def work_prec(self) -> int:
        """Internal precision N + q ceil(log_p M) + 2."""
        return self.n_prec + self.q * math.ceil(math.log(self.x_trunc, self.p)) + 2

    def replace(self, **changes) -> "TruncationParams":
        return TruncationParams(**{**asdict(self), **changes})

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TruncationParams":
        data = json.loads(text)
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown fields: {sorted(unknown)}")
        return cls(**data)

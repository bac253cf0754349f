"""Finite cochain complexes of free Z/p^N-modules.

Cohomology, mapping fibres, truncations, connecting maps of degreewise split
short exact sequences and a checker for the induced long exact sequence.
Every submodule is a generator matrix (columns), see linalg.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

import numpy as np

from .linalg import (Ring, _cat, kernel,
                     preimage, quotient_length, same_span, smith, solve)


@dataclass(frozen=True)
class FinModule:
    """(Z/p^N)^rank modulo the column span of relations."""

    ring: Ring
    rank: int
    relations: np.ndarray

    def invariant_factors(self) -> list[int]:
        """Exponents k of the cyclic summands Z/p^k (k = N marks a free summand)."""
        if self.rank == 0:
            return []
        sf = smith(self.ring, self.relations, track_v=False) if self.relations.size else None
        exps = [] if sf is None else sf.exps
        out = [self.ring.prec] * (self.rank - len(exps))
        out += [v for v in exps if v > 0]
        return sorted(out)

    @property
    def length(self) -> int:
        return sum(self.invariant_factors())

    def is_zero(self) -> bool:
        return self.length == 0

    def to_json(self) -> dict:
        return {"p": self.ring.p, "prec": self.ring.prec, "invariant_factors": self.invariant_factors()}


@dataclass
class FinComplex:
    """C^0 -> C^1 -> ... with free terms of the given ranks; diffs[i] : C^i -> C^(i+1)."""

    ring: Ring
    ranks: list[int]
    diffs: list[np.ndarray] = field(default_factory=list)
    check: bool = True

    def __post_init__(self):
        if not self.diffs:
            self.diffs = [self.ring.zeros(self.ranks[i + 1], self.ranks[i]) for i in range(len(self.ranks) - 1)]
        if len(self.diffs) != len(self.ranks) - 1:
            raise ValueError("need one differential between consecutive terms")
        for i, dmat in enumerate(self.diffs):
            if dmat.shape != (self.ranks[i + 1], self.ranks[i]):
                raise ValueError(f"d^{i} has shape {dmat.shape}")
        if self.check:
            for i in range(len(self.diffs) - 1):
                if self.ring.matmul(self.diffs[i + 1], self.diffs[i]).any():
                    raise ValueError(f"d^{i + 1} o d^{i} != 0")

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def rank(self, i: int) -> int:
        return self.ranks[i] if 0 <= i <= self.top else 0

    def d(self, i: int) -> np.ndarray:
        """d^i : C^i -> C^(i+1), zero outside the range."""
        if 0 <= i < self.top:
            return self.diffs[i]
        return self.ring.zeros(self.rank(i + 1), self.rank(i))

    def cocycles(self, i: int) -> np.ndarray:
        n = self.rank(i)
        if n == 0:
            return self.ring.zeros(0, 0)
        dm = self.d(i)
        return kernel(self.ring, dm) if dm.shape[0] else self.ring.identity(n)

    def coboundaries(self, i: int) -> np.ndarray:
        return self.d(i - 1) % self.ring.modulus

    def to_json(self) -> dict:
        return {"p": self.ring.p, "prec": self.ring.prec, "ranks": self.ranks,
                "diffs": [dm.astype(object).tolist() for dm in self.diffs]}

    @classmethod
    def from_json(cls, data: dict) -> "FinComplex":
        ring = Ring(data["p"], data["prec"])
        diffs = [ring.array(dm) if dm and dm[0] else ring.zeros(data["ranks"][i + 1], data["ranks"][i])
                 for i, dm in enumerate(data["diffs"])]
        return cls(ring, list(data["ranks"]), diffs)


def cohomology(c: FinComplex, i: int) -> FinModule:
    """H^i = Z^i / B^i presented on the chosen cocycle generators."""
    ring = c.ring
    Z = c.cocycles(i)
    k = Z.shape[1]
    if k == 0:
        return FinModule(ring, 0, ring.zeros(0, 0))
    rel = preimage(ring, Z, c.coboundaries(i))
    return FinModule(ring, k, rel)


def cohomology_length(c: FinComplex, i: int) -> int:
    """log_p of the order of H^i."""
    n = c.rank(i)
    if n == 0:
        return 0
    return quotient_length(c.ring, c.cocycles(i), _cat(c.ring, n, c.coboundaries(i)))


@dataclass
class ChainMap:
    src: FinComplex
    tgt: FinComplex
    maps: list[np.ndarray]
    check: bool = True

    def __post_init__(self):
        ring = self.src.ring
        n = max(self.src.top, self.tgt.top) + 1
        maps = list(self.maps) + [None] * (n - len(self.maps))
        self.maps = [ring.zeros(self.tgt.rank(i), self.src.rank(i)) if m is None else m % ring.modulus
                     for i, m in enumerate(maps)]
        if self.check:
            for i in range(n - 1):
                lhs = ring.matmul(self.at(i + 1), self.src.d(i))
                rhs = ring.matmul(self.tgt.d(i), self.at(i))
                if ((lhs - rhs) % ring.modulus).any():
                    raise ValueError(f"chain map fails to commute in degree {i}")

    def at(self, i: int) -> np.ndarray:
        if 0 <= i < len(self.maps):
            return self.maps[i]
        return self.src.ring.zeros(self.tgt.rank(i), self.src.rank(i))


def mapping_fiber(f: ChainMap) -> FinComplex:
    """MF(f)^i = C^i + D^(i-1), (x, y) -> (dx, f(x) - dy)."""
    C, D = f.src, f.tgt
    ring = C.ring
    top = max(C.top, D.top + 1)
    ranks = [C.rank(i) + D.rank(i - 1) for i in range(top + 1)]
    diffs = []
    for i in range(top):
        a, b = C.rank(i), D.rank(i - 1)
        a1, b1 = C.rank(i + 1), D.rank(i)
        m = ring.zeros(a1 + b1, a + b)
        m[:a1, :a] = C.d(i)
        m[a1:, :a] = f.at(i)
        m[a1:, a:] = (-D.d(i - 1)) % ring.modulus
        diffs.append(m)
    return FinComplex(ring, ranks, diffs)


def shift_down(D: FinComplex) -> FinComplex:
    """D[-1]: degree i holds D^(i-1), differential -d."""
    ring = D.ring
    ranks = [0] + list(D.ranks)
    diffs = [ring.zeros(D.rank(0), 0)] + [(-dm) % ring.modulus for dm in D.diffs]
    return FinComplex(ring, ranks, diffs)


def truncate_geq(c: FinComplex, n: int) -> FinComplex:
    """C^{>=n}: zero below degree n."""
    if n < 0 or n > c.top + 1:
        raise ValueError(f"truncation degree {n} out of range 0..{c.top + 1}")
    ring = c.ring
    ranks = [c.ranks[i] if i >= n else 0 for i in range(c.top + 1)]
    diffs = [c.diffs[i] if i >= n else ring.zeros(ranks[i + 1], ranks[i]) for i in range(c.top)]
    return FinComplex(ring, ranks, diffs)


def zero_complex(ring: Ring, top: int) -> FinComplex:
    return FinComplex(ring, [0] * (top + 1))


def identity_map(c: FinComplex) -> ChainMap:
    return ChainMap(c, c, [c.ring.identity(r) for r in c.ranks])


def zero_map(src: FinComplex, tgt: FinComplex) -> ChainMap:
    return ChainMap(src, tgt, [])


# --- short exact sequences --------------------------------------------------


@dataclass
class ShortExact:
    """0 -> A --incl--> B --proj--> C -> 0, degreewise split."""

    incl: ChainMap
    proj: ChainMap

    def __post_init__(self):
        ring = self.ring
        for i in range(self.middle.top + 1):
            inc, pr = self.incl.at(i), self.proj.at(i)
            if ring.matmul(pr, inc).any():
                raise ValueError(f"proj o incl != 0 in degree {i}")
            if kernel(ring, inc).shape[1] and kernel(ring, inc).any():
                raise ValueError(f"incl is not injective in degree {i}")
            if not same_span(ring, kernel(ring, pr) if pr.shape[0] else ring.identity(pr.shape[1]),
                             _cat(ring, pr.shape[1], inc)):
                raise ValueError(f"sequence is not exact in the middle in degree {i}")
            if self.third.rank(i) and not same_span(ring, _cat(ring, pr.shape[0], pr), ring.identity(pr.shape[0])):
                raise ValueError(f"proj is not surjective in degree {i}")

    @property
    def ring(self) -> Ring:
        return self.middle.ring

    @property
    def first(self):
        return self.incl.src

    @property
    def middle(self):
        return self.incl.tgt

    @property
    def third(self):
        return self.proj.tgt

    def section(self, i: int) -> np.ndarray:
        """A linear section of proj in degree i."""
        ring = self.ring
        pr = self.proj.at(i)
        cols = []
        for k in range(pr.shape[0]):
            e = ring.zeros(pr.shape[0], 1)[:, 0]
            e[k] = 1
            cols.append(solve(ring, pr, e))
        if not cols:
            return ring.zeros(pr.shape[1], 0)
        return np.stack(cols, axis=1)

    def connecting(self, i: int, cocycles: np.ndarray | None = None) -> np.ndarray:
        """delta on cocycles of C^i (columns), landing in cocycles of A^(i+1)."""
        ring = self.ring
        Zc = self.third.cocycles(i) if cocycles is None else cocycles
        if Zc.shape[1] == 0:
            return ring.zeros(self.first.rank(i + 1), 0)
        lifted = ring.matmul(self.section(i), Zc)
        db = ring.matmul(self.middle.d(i), lifted)
        inc = self.incl.at(i + 1)
        cols = []
        for j in range(db.shape[1]):
            a = solve(ring, inc, db[:, j])
            if a is None:
                raise ValueError("input to the connecting map is not a cocycle")
            cols.append(a)
        return np.stack(cols, axis=1) if cols else ring.zeros(inc.shape[1], 0)


def connecting_map(ses: ShortExact, i: int) -> np.ndarray:
    return ses.connecting(i)


def mapping_fiber_sequence(f: ChainMap) -> ShortExact:
    """0 -> D[-1] -> MF(f) -> C -> 0."""
    C, D = f.src, f.tgt
    ring = C.ring
    MF = mapping_fiber(f)
    Dm = shift_down(D)
    incl, proj = [], []
    for i in range(MF.top + 1):
        a, b = C.rank(i), D.rank(i - 1)
        inc = ring.zeros(a + b, b)
        inc[a:, :] = ring.identity(b)
        pr = ring.zeros(a, a + b)
        pr[:, :a] = ring.identity(a)
        incl.append(inc)
        proj.append(pr)
    return ShortExact(ChainMap(Dm, MF, incl), ChainMap(MF, C, proj))


def _image_mod(ring, fmat, Z, B, n):
    return _cat(ring, n, ring.matmul(fmat, Z) if Z.shape[1] else ring.zeros(n, 0), B)


def les_report(ses: ShortExact) -> list[dict]:
    """Exactness of the long exact sequence at every node.

    Each node compares image and kernel as submodules of the cocycle space
    modulo coboundaries; both are lifted to submodules of the ambient term.
    """
    ring = ses.ring
    A, B, C = ses.first, ses.middle, ses.third
    out = []
    for i in range(B.top + 1):
        ZA, BA = A.cocycles(i), A.coboundaries(i)
        ZB, BB = B.cocycles(i), B.coboundaries(i)
        ZC, BC = C.cocycles(i), C.coboundaries(i)
        nB, nC = B.rank(i), C.rank(i)
        inc, pr = ses.incl.at(i), ses.proj.at(i)
        # at H^i(B): im incl_* == ker proj_*
        im_i = _image_mod(ring, inc, ZA, BB, nB)
        ker_p = _cat(ring, nB, ring.matmul(ZB, preimage(ring, ring.matmul(pr, ZB), BC)) if ZB.shape[1] else ring.zeros(nB, 0), BB)
        out.append({"node": f"H^{i}(B)", "exact": nB == 0 or same_span(ring, im_i, ker_p)})
        # at H^i(C): im proj_* == ker delta
        im_p = _image_mod(ring, pr, ZB, BC, nC)
        delta = ses.connecting(i, ZC)
        BA1 = A.coboundaries(i + 1)
        if ZC.shape[1]:
            pre = preimage(ring, delta, BA1) if delta.shape[0] else ring.identity(ZC.shape[1])
            ker_d = _cat(ring, nC, ring.matmul(ZC, pre), BC)
        else:
            ker_d = _cat(ring, nC, BC)
        out.append({"node": f"H^{i}(C)", "exact": nC == 0 or same_span(ring, im_p, ker_d)})
        # at H^(i+1)(A): im delta == ker incl_*
        nA1 = A.rank(i + 1)
        im_d = _cat(ring, nA1, delta, BA1)
        ZA1 = A.cocycles(i + 1)
        BB1 = B.coboundaries(i + 1)
        inc1 = ses.incl.at(i + 1)
        if ZA1.shape[1]:
            pre = preimage(ring, ring.matmul(inc1, ZA1), BB1) if inc1.shape[0] else ring.identity(ZA1.shape[1])
            ker_i = _cat(ring, nA1, ring.matmul(ZA1, pre), BA1)
        else:
            ker_i = _cat(ring, nA1, BA1)
        out.append({"node": f"H^{i + 1}(A)", "exact": nA1 == 0 or same_span(ring, im_d, ker_i)})
    return out


def les_exact(ses: ShortExact) -> bool:
    return all(r["exact"] for r in les_report(ses))


# --- random instances -------------------------------------------------------


def _rand_matrix(ring: Ring, rng: random.Random, rows: int, cols: int) -> np.ndarray:
    return ring.array([[rng.randrange(ring.modulus) for _ in range(cols)] for _ in range(rows)]).reshape(rows, cols)


def random_complex(ring: Ring, rng: random.Random, n_terms: int = 4, max_rank: int = 6) -> FinComplex:
    """Random complex with d^(i+1) o d^i = 0 built through left kernels."""
    ranks = [rng.randint(0, max_rank) for _ in range(n_terms)]
    diffs = []
    for i in range(n_terms - 1):
        if i == 0 or diffs[-1].shape[1] == 0 or ranks[i] == 0:
            diffs.append(_rand_matrix(ring, rng, ranks[i + 1], ranks[i]))
            continue
        prev = diffs[-1]
        left = kernel(ring, prev.T.copy()) if prev.shape[0] else ring.zeros(0, 0)
        # rows of left.T annihilate im(prev)
        coeff = _rand_matrix(ring, rng, ranks[i + 1], left.shape[1])
        diffs.append(ring.matmul(coeff, left.T.copy()) if left.shape[1] else ring.zeros(ranks[i + 1], ranks[i]))
    return FinComplex(ring, ranks, diffs)


def random_chain_map(src: FinComplex, tgt: FinComplex, rng: random.Random) -> ChainMap:
    """A random solution of f^(i+1) d = d f^i, found from the kernel of the linear system."""
    ring = src.ring
    n = max(src.top, tgt.top) + 1
    shapes = [(tgt.rank(i), src.rank(i)) for i in range(n)]
    offsets, total = [], 0
    for r, c in shapes:
        offsets.append(total)
        total += r * c
    if total == 0:
        return ChainMap(src, tgt, [])
    eqs = []
    for i in range(n - 1):
        dC, dD = src.d(i), tgt.d(i)
        r1, c1 = shapes[i + 1]
        r0, c0 = shapes[i]
        # entry (a, b) of f^(i+1) dC - dD f^i for a < r1, b < c0
        for a in range(r1):
            for b in range(c0):
                row = np.zeros(total, dtype=object)
                for k in range(c1):
                    row[offsets[i + 1] + a * c1 + k] += int(dC[k, b])
                for k in range(r0):
                    row[offsets[i] + k * c0 + b] -= int(dD[a, k])
                eqs.append(row)
    if eqs:
        system = ring.array(np.stack(eqs))
        sols = kernel(ring, system)
    else:
        sols = ring.identity(total)
    weights = ring.array([rng.randrange(ring.modulus) for _ in range(sols.shape[1])]).reshape(-1, 1)
    vec = ring.matmul(sols, weights)[:, 0] if sols.shape[1] else ring.zeros(total, 1)[:, 0]
    maps = []
    for i, (r, c) in enumerate(shapes):
        maps.append(vec[offsets[i]: offsets[i] + r * c].reshape(r, c).copy())
    return ChainMap(src, tgt, maps)


def complex_report(c: FinComplex) -> dict:
    return {
        "ranks": list(c.ranks),
        "cohomology": [cohomology(c, i).invariant_factors() for i in range(c.top + 1)],
    }


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True)

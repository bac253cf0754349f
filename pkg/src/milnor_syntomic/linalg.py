"""Linear algebra over the local ring Z/p^P.

Submodules of (Z/p^P)^n are carried as generator matrices (columns).  The
workhorse is a Smith normal form with valuation pivoting; everything else
(kernels, intersections, preimages, lengths) reduces to it.

Arrays are int64 whenever p^P is small enough that a product of two residues
fits, otherwise numpy object arrays of Python ints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_INT64_SAFE = 3_000_000_000


def valuation(x: int, p: int) -> int | None:
    """p-adic valuation of a nonzero integer, None for zero."""
    x = int(x)
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass(frozen=True)
class Ring:
    """The coefficient ring Z/p^prec."""

    p: int
    prec: int

    @property
    def modulus(self) -> int:
        return self.p**self.prec

    @property
    def dtype(self):
        return np.int64 if self.modulus < _INT64_SAFE else object

    def array(self, data, shape=None) -> np.ndarray:
        if shape is not None and data is None:
            a = np.zeros(shape, dtype=np.int64)
            return a if self.dtype is np.int64 else a.astype(object)
        a = np.array(data, dtype=object)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        a = a % self.modulus
        return a.astype(self.dtype) if self.dtype is np.int64 else a

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return self.array(None, shape=(rows, cols))

    def identity(self, n: int) -> np.ndarray:
        a = self.zeros(n, n)
        for i in range(n):
            a[i, i] = 1
        return a

    def valuations(self, a: np.ndarray) -> np.ndarray:
        """Elementwise valuation; zero entries get prec."""
        out = np.full(a.shape, self.prec, dtype=np.int64)
        if a.size == 0:
            return out
        live = a != 0
        pk = 1
        for k in range(self.prec):
            pk_next = pk * self.p
            hit = live & ((a % pk_next) != 0)
            out[hit] = k
            live &= ~hit
            pk = pk_next
        return out

    def inverse(self, u: int) -> int:
        return pow(int(u), -1, self.modulus)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """a @ b mod p^prec without int64 overflow in the inner sums."""
        if a.shape[1] == 0:
            return self.zeros(a.shape[0], b.shape[1])
        if self.dtype is np.int64 and self.modulus**2 * a.shape[1] < 2**62:
            return (a @ b) % self.modulus
        out = (a.astype(object) @ b.astype(object)) % self.modulus
        return out.astype(self.dtype) if self.dtype is np.int64 else out


@dataclass
class SmithForm:
    """U @ A @ V == diag(p^exps) (padded); U is only kept on request."""

    exps: list[int]
    V: np.ndarray
    ncols: int
    U: np.ndarray | None = None

    @property
    def rank(self) -> int:
        return len(self.exps)


def _min_valuation_entry(ring: Ring, sub: np.ndarray) -> tuple[int, int, int]:
    """Position and valuation of an entry of minimal valuation (sub is nonzero)."""
    pk = ring.p
    for v in range(ring.prec):
        hit = np.flatnonzero(sub % pk)
        if hit.size:
            r, c = divmod(int(hit[0]), sub.shape[1])
            return r, c, v
        pk *= ring.p
    raise ValueError("zero matrix")


def smith(ring: Ring, a: np.ndarray, track_v: bool = True, track_u: bool = False) -> SmithForm:
    m, n = a.shape
    mod = ring.modulus
    p = ring.p
    work = a.copy() % mod
    V = ring.identity(n) if track_v else None
    U = ring.identity(m) if track_u else None
    exps: list[int] = []
    for k in range(min(m, n)):
        sub = work[k:, k:]
        if not sub.any():
            break
        r, c, v = _min_valuation_entry(ring, sub)
        r += k
        c += k
        if r != k:
            work[[k, r], :] = work[[r, k], :]
            if track_u:
                U[[k, r], :] = U[[r, k], :]
        if c != k:
            work[:, [k, c]] = work[:, [c, k]]
            if track_v:
                V[:, [k, c]] = V[:, [c, k]]
        pv = p**v
        unit = int(work[k, k]) // pv
        uinv = ring.inverse(unit)
        work[k, :] = (work[k, :] * uinv) % mod
        if track_u:
            U[k, :] = (U[k, :] * uinv) % mod
        # pivot is now exactly p^v; every entry below/right is divisible by p^v
        # only touch the rows / columns that actually need clearing
        rows = np.flatnonzero(work[k + 1 :, k]) + k + 1
        if rows.size:
            col = work[rows, k] // pv
            work[rows, :] = (work[rows, :] - np.outer(col, work[k, :])) % mod
            if track_u:
                U[rows, :] = (U[rows, :] - np.outer(col, U[k, :])) % mod
        cols = np.flatnonzero(work[k, k + 1 :]) + k + 1
        if cols.size:
            row = work[k, cols] // pv
            work[:, cols] = (work[:, cols] - np.outer(work[:, k], row)) % mod
            if track_v:
                V[:, cols] = (V[:, cols] - np.outer(V[:, k], row)) % mod
        exps.append(v)
    return SmithForm(exps=exps, V=V, ncols=n, U=U)


def span_length(ring: Ring, gens: np.ndarray) -> int:
    """Length (log_p of the order) of the column span."""
    if gens.size == 0:
        return 0
    sf = smith(ring, gens, track_v=False)
    return sum(ring.prec - v for v in sf.exps)


def invariant_exponents(ring: Ring, gens: np.ndarray) -> list[int]:
    """Exponents k with span = sum of Z/p^k; free summands show up as prec."""
    if gens.size == 0:
        return []
    sf = smith(ring, gens, track_v=False)
    return sorted(ring.prec - v for v in sf.exps)


def kernel(ring: Ring, a: np.ndarray) -> np.ndarray:
    """Generators (columns) of {x : a @ x == 0}."""
    m, n = a.shape
    if n == 0:
        return ring.zeros(0, 0)
    if m == 0:
        return ring.identity(n)
    sf = smith(ring, a)
    cols = []
    for i, v in enumerate(sf.exps):
        if v > 0:
            cols.append((sf.V[:, i] * ring.p ** (ring.prec - v)) % ring.modulus)
    for i in range(sf.rank, n):
        cols.append(sf.V[:, i])
    if not cols:
        return ring.zeros(n, 0)
    return np.stack(cols, axis=1)


def zp_kernel(ring: Ring, a: np.ndarray, with_accuracy: bool = False):
    """Kernel of a viewed as a map of free Z_p-modules (no p^k-torsion artefacts).

    Only the Smith columns beyond the rank survive.  They agree with a true
    Z_p-kernel basis modulo p^(prec - v), v the largest Smith exponent; with
    with_accuracy the pair (kernel, prec - v) is returned.
    """
    m, n = a.shape
    if n == 0 or m == 0:
        ker = ring.zeros(n, 0) if n == 0 else ring.identity(n)
        return (ker, ring.prec) if with_accuracy else ker
    sf = smith(ring, a)
    ker = ring.zeros(n, 0) if sf.rank == n else sf.V[:, sf.rank:] % ring.modulus
    acc = ring.prec - max(sf.exps, default=0)
    return (ker, acc) if with_accuracy else ker


def zp_preimage(ring: Ring, f: np.ndarray, target: np.ndarray, with_accuracy: bool = False):
    """{x : f x in the Z_p-span of target}, saturated version of preimage."""
    n = f.shape[1]
    if target.shape[1] == 0:
        return zp_kernel(ring, f, with_accuracy)
    ker, acc = zp_kernel(ring, np.concatenate([f, (-target) % ring.modulus], axis=1), True)
    ker = ker[:n, :] % ring.modulus
    return (ker, acc) if with_accuracy else ker


def hstack(ring: Ring, *mats: np.ndarray) -> np.ndarray:
    mats = [m for m in mats if m.shape[1] > 0]
    if not mats:
        return None
    return np.concatenate(mats, axis=1) % ring.modulus


def _cat(ring: Ring, n: int, *mats: np.ndarray) -> np.ndarray:
    out = hstack(ring, *mats)
    return ring.zeros(n, 0) if out is None else out


def sum_length(ring: Ring, n: int, *gens: np.ndarray) -> int:
    return span_length(ring, _cat(ring, n, *gens))


def contains(ring: Ring, big: np.ndarray, small: np.ndarray) -> bool:
    """span(small) is a submodule of span(big)."""
    n = big.shape[0]
    if small.shape[1] == 0:
        return True
    return sum_length(ring, n, big, small) == span_length(ring, big)


def same_span(ring: Ring, a: np.ndarray, b: np.ndarray) -> bool:
    return contains(ring, a, b) and contains(ring, b, a)


def intersection(ring: Ring, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    if a.shape[1] == 0 or b.shape[1] == 0:
        return ring.zeros(n, 0)
    ker = kernel(ring, np.concatenate([a, (-b) % ring.modulus], axis=1))
    return ring.matmul(a, ker[: a.shape[1], :])


def preimage(ring: Ring, f: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Generators of {x : f @ x in span(target)}."""
    n = f.shape[1]
    if target.shape[1] == 0:
        return kernel(ring, f)
    ker = kernel(ring, np.concatenate([f, (-target) % ring.modulus], axis=1))
    return ker[:n, :] % ring.modulus


def quotient_length(ring: Ring, num: np.ndarray, den: np.ndarray) -> int:
    """Length of (span(num) + span(den)) / span(den)."""
    n = num.shape[0]
    return sum_length(ring, n, num, den) - span_length(ring, den)


def solve(ring: Ring, a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Some x with a @ x == b (column b), or None if b is not in the span."""
    n = a.shape[1]
    ker = kernel(ring, np.concatenate([a, b.reshape(-1, 1) % ring.modulus], axis=1))
    # need a kernel vector whose last coordinate is a unit
    last = ker[n, :] if ker.shape[1] else np.array([])
    for j in range(ker.shape[1]):
        if int(last[j]) % ring.p != 0:
            u = ring.inverse(int(last[j]))
            return ((-ker[:n, j]) * u) % ring.modulus
    # combinations of non-unit last coordinates never reach a unit (local ring)
    return None


def left_inverse(ring: Ring, g: np.ndarray) -> np.ndarray:
    """L with L @ g == 1, for g whose columns span a direct summand."""
    sf = smith(ring, g, track_u=True)
    n = g.shape[1]
    if sf.rank != n or any(sf.exps):
        raise ArithmeticError("columns do not span a direct summand")
    # U g V = [1; 0]  =>  (V [1 0] U) g = 1
    return ring.matmul(sf.V, sf.U[:n, :])

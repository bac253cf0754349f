"""Filtrations, graded pieces and the closed-form reference formulas.

Two kinds of answers meet here.  Formula side: a StructureDescriptor, a formal
direct sum of atoms (Omega_k^q, Omega^q/B_s, k/k^p, ...) each of which can be
evaluated to a window-dimension profile, i.e. the length of its graded piece at
each T-multidegree b.  Computed side: the same profile read off the syntomic
lattices by linear algebra over Z/p^P.  Comparisons are per multidegree.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from math import comb
from typing import Iterable

import numpy as np

from . import lattice as L
from .complexes import FinModule
from .diff_forms import OmegaAModule, b_dims, form_labels, merge_labels, window_degrees
from .linalg import (Ring, _cat, intersection, kernel, preimage, quotient_length, span_length, zp_kernel,
                     zp_preimage)
from .params import HypothesisError, TruncationParams

# --- descriptors ------------------------------------------------------------------

ATOM_KINDS = ("OmegaK", "OmegaModB", "KMilnor", "CokerCartier", "KModKp", "KPower", "Zero", "ZfrakQuotient")


@dataclass(frozen=True)
class Atom:
    """One summand.  args by kind:

    OmegaK (q,), OmegaModB (q, s), KMilnor (q,), CokerCartier (q, s, m, variant),
    KModKp (), KPower (j,), Zero (), ZfrakQuotient (q, a, n, top).  The last one is
    (p^a Omega^q_A0 cap Zfrak_n Omega^q_A0 + p^top Omega^q_A0) / p^top Omega^q_A0.
    """

    kind: str
    args: tuple = ()
    tag: str = ""

    def __post_init__(self):
        if self.kind not in ATOM_KINDS:
            raise ValueError(f"unknown atom kind {self.kind}")
        object.__setattr__(self, "args", tuple(self.args))

    def __str__(self):
        a = self.args
        body = {
            "OmegaK": lambda: f"Omega_k^{a[0]}",
            "OmegaModB": lambda: f"Omega_k^{a[0]}/B_{a[1]}",
            "KMilnor": lambda: f"K_{a[0]}(k)",
            "CokerCartier": lambda: f"coker(Omega^{a[0] - 2} -> Omega^{a[0] - 1}/B_{a[1]} + Omega^{a[0] - 2}/B_{a[1]}; m={a[2]}"
                                    + (", 1+aC" if a[3] == "1+aC" else "") + ")",
            "KModKp": lambda: "k/k^p",
            "KPower": lambda: f"k^(p^{a[0]})",
            "Zero": lambda: "0",
            "ZfrakQuotient": lambda: _zfrak_str(*a),
        }[self.kind]()
        return f"{self.tag}({body})" if self.tag else body


def _zfrak_str(q, a, n, top):
    inner = f"Omega_A0^{q}"
    if a > 0:
        inner = f"p^{a} {inner}"
    if n > 0:
        inner = f"({inner} cap Z_{n} Omega_A0^{q})"
    return f"{inner} / p^{top}"


@dataclass(frozen=True)
class StructureDescriptor:
    atoms: tuple = ()
    note: str = ""

    def __str__(self):
        live = [a for a in self.atoms if a.kind != "Zero"]
        return " + ".join(str(a) for a in live) if live else "0"

    def to_json(self) -> dict:
        return {"atoms": [{"kind": a.kind, "args": list(a.args), "tag": a.tag} for a in self.atoms],
                "note": self.note, "text": str(self)}

    @classmethod
    def from_json(cls, data: dict) -> "StructureDescriptor":
        return cls(tuple(Atom(a["kind"], tuple(a["args"]), a.get("tag", "")) for a in data["atoms"]), data.get("note", ""))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def descriptor(*atoms: Atom, note: str = "") -> StructureDescriptor:
    atoms = tuple(a for a in atoms if a.kind != "Zero") or (Atom("Zero"),)
    return StructureDescriptor(atoms, note)


ZERO = descriptor()


# --- window-dimension evaluators ------------------------------------------------------


def _v(x: int, p: int) -> int:
    if x == 0:
        return 10**9
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _omega_dim(m: int, q: int) -> int:
    return comb(m, q) if 0 <= q <= m else 0


def _d_int(b: tuple, m: int, k: int) -> np.ndarray:
    """Integer matrix of d: Omega^k_A0(b) -> Omega^(k+1)_A0(b) on dlog labels."""
    src, tgt = form_labels(m, k, False), form_labels(m, k + 1, False)
    index = {lab: i for i, lab in enumerate(tgt)}
    mat = np.zeros((len(tgt), len(src)), dtype=object)
    for col, lab in enumerate(src):
        for i, w in enumerate(b):
            merged = merge_labels((i,), lab) if w else None
            if merged is None:
                continue
            sign, new = merged
            mat[index[new], col] += sign * w
    return mat


def zfrak_quotient_length(p: int, m: int, b: tuple, q: int, a: int, n: int, top: int) -> int:
    """Length of (p^a Omega^q cap Zfrak_n Omega^q + p^top Omega^q) / p^top Omega^q at degree b."""
    rank = _omega_dim(m, q)
    if rank == 0:
        return 0
    ring = Ring(p, top + max(n, 0) + max(a, 0) + 2)
    ident = ring.identity(rank)
    sub = (ident * p ** max(a, 0)) % ring.modulus
    if n > 0 and _omega_dim(m, q + 1):
        dmat = ring.array(_d_int(b, m, q))
        target = (ring.identity(dmat.shape[0]) * p**n) % ring.modulus
        zn = preimage(ring, dmat, target)
        sub = intersection(ring, sub, zn)
    low = (ident * p**top) % ring.modulus
    return quotient_length(ring, sub, low)


def _b_dims_cached(params: TruncationParams, s: int, q: int, cache: dict) -> dict:
    key = (s, q)
    if key not in cache:
        cache[key] = b_dims(params, s, q) if q >= 1 else {b: 0 for b in window_degrees(params)}
    return cache[key]


def _coker_cartier_dim(params, t: tuple, q: int, s: int, mult: int, cache: dict) -> int:
    """Plain coker of omega -> (C^-s(d omega), (-1)^q m C^-s(omega)) at target degree t.

    C^-s keeps dlog coordinates and multiplies the degree by p^s, so only the
    source degree t / p^s contributes.  The (1+aC) variant has the same graded
    dimensions: 1 + aC is unipotent for the ordering by |degree|.
    """
    p, m = params.p, params.m_pbase
    n1, n2 = _omega_dim(m, q - 1), _omega_dim(m, q - 2)
    if n1 + n2 == 0:
        return 0
    spaces = cache.setdefault(("spaces", s), {})
    for deg in (q - 1, q - 2):
        if deg not in spaces:
            from .diff_forms import b_spaces
            spaces[deg] = b_spaces(params, s, deg) if deg >= 1 else None
    ring = Ring(p, 1)
    cols = []
    if spaces[q - 1] is not None and spaces[q - 1][t].size:
        blk = spaces[q - 1][t] % p
        cols.append(np.concatenate([blk, np.zeros((n2, blk.shape[1]), dtype=np.int64)], axis=0))
    if q - 2 >= 1 and spaces[q - 2] is not None and spaces[q - 2][t].size:
        blk = spaces[q - 2][t] % p
        cols.append(np.concatenate([np.zeros((n1, blk.shape[1]), dtype=np.int64), blk], axis=0))
    if n2 and all(x % p**s == 0 for x in t):
        c = tuple(x // p**s for x in t)
        dmat = np.array(_d_int(c, m, q - 2) % p, dtype=np.int64).reshape(n1, n2)
        sign = (-1) ** q * mult
        cols.append(np.concatenate([dmat, (sign * np.eye(n2, dtype=np.int64)) % p], axis=0))
    if not cols:
        return n1 + n2
    return n1 + n2 - span_length(ring, np.concatenate(cols, axis=1) % p)


def atom_window_dims(atom: Atom, params: TruncationParams, cache: dict | None = None) -> dict:
    """Length of the atom's graded piece at every multidegree of the window."""
    cache = {} if cache is None else cache
    p, m = params.p, params.m_pbase
    degrees = window_degrees(params)
    k, a = atom.kind, atom.args
    if k == "Zero":
        return {b: 0 for b in degrees}
    if k == "KMilnor":
        raise NotImplementedError("K_q(k) is carried symbolically only")
    if k == "OmegaK":
        return {b: _omega_dim(m, a[0]) for b in degrees}
    if k == "OmegaModB":
        q, s = a
        bd = _b_dims_cached(params, s, q, cache)
        return {b: _omega_dim(m, q) - bd[b] for b in degrees}
    if k == "KModKp":
        return {b: 0 if all(x % p == 0 for x in b) else 1 for b in degrees}
    if k == "KPower":
        return {b: 1 if all(x % p ** a[0] == 0 for x in b) else 0 for b in degrees}
    if k == "ZfrakQuotient":
        return {b: zfrak_quotient_length(p, m, b, *a) for b in degrees}
    if k == "CokerCartier":
        q, s, mult, _variant = a
        return {b: _coker_cartier_dim(params, b, q, s, mult, cache) for b in degrees}
    raise ValueError(k)


def window_dims(desc: StructureDescriptor, params: TruncationParams) -> dict:
    cache: dict = {}
    out = {b: 0 for b in window_degrees(params)}
    for atom in desc.atoms:
        for b, v in atom_window_dims(atom, params, cache).items():
            out[b] += v
    return out


# --- index helpers --------------------------------------------------------------------


def eta_indices(i: int, e: int, p: int) -> tuple[int, int]:
    """(eta_i, eta'_i): p^(eta-1) i < e <= p^eta i and p^(eta'-1) i - 1 < e <= p^eta' i - 1."""
    if not 1 <= i < e:
        raise ValueError(f"eta indices need 1 <= i < e (got i={i}, e={e})")

    def scan(f):
        k = 0
        while not f(k):
            k += 1
            if k > 64:
                raise ValueError("no eta index found")
        return k

    eta = scan(lambda k: p ** (k - 1) * i < e <= p**k * i if k >= 1 else e <= i)
    eta2 = scan(lambda k: p ** (k - 1) * i - 1 < e <= p**k * i - 1 if k >= 1 else e <= i - 1)
    return eta, eta2


def vi_indices(n: int, e: int, p: int) -> tuple[int, int]:
    """(l_n, s_n): l_n maximal with n - l_n e >= e/(p-1), s_n = v_p(n - l_n e)."""
    if n * (p - 1) <= e * p:
        raise ValueError(f"n > ep/(p-1) is required (got n={n}, e={e}, p={p})")
    l = n // e
    while (n - l * e) * (p - 1) < e:
        l -= 1
    return l, _v(n - l * e, p)


def _check_p_nmid_e(params: TruncationParams):
    if params.e % params.p == 0:
        raise HypothesisError("p ∤ e is required")


# --- the X-filtration on the modified complex ------------------------------


def x_filtration_generators(params: TruncationParams, i: int, r: int, s: int, points) -> L.Term:
    """fil_i(I^[r] (x) Omega^s) on the given (X-degree, T-degree) points, as a diagonal lattice.

    The lattice exponent at each key is the minimum over the generators
    X^n (X^e)^[j] p^[l] a omega with n + e j >= i, j + l >= r (n >= 1 on dX/X labels).
    """
    if not 0 <= r <= 2:
        raise ValueError(f"r must lie in 0..2 (got {r})")
    if i < 0:
        raise ValueError("i >= 0 is required")
    return L.make_term(params, points, s, "I", r=r, i=i)


def fil_generator_allowed(params: TruncationParams, i: int, r: int, n: int, j: int, l: int, has_dx: bool) -> bool:
    """Membership test of a single generator X^n (X^e)^[j] p^[l] in fil_i(I^[r])."""
    return n + params.e * j >= i and j + l >= r and n >= (1 if has_dx else 0)


@dataclass
class _Block:
    pts: list
    q: int
    params: TruncationParams
    ring: Ring

    def term(self, deg: int, kind_r: int, i: int) -> L.Term:
        return L.make_term(self.params, self.pts, deg, "I", r=kind_r, i=i)

    def ambient(self):
        q = self.q
        # degree q-2: I^[2] (x) Omega^(q-2); degree q-1: I^[1] (x) Omega^(q-1) + D (x) Omega^(q-2);
        # degree q: D (x) Omega^q + D (x) Omega^(q-1)
        return {
            "x0": self.term(q - 2, 2, 0),
            "x1": self.term(q - 1, 1, 0), "y1": self.term(q - 2, 0, 0),
            "x2": self.term(q, 0, 0), "y2": self.term(q - 1, 0, 0),
        }

    def differentials(self, amb):
        ring, params, q = self.ring, self.params, self.q
        x0, x1, y1, x2, y2 = amb["x0"], amb["x1"], amb["y1"], amb["x2"], amb["y2"]
        d0 = np.concatenate([
            L.d_matrix(ring, params, x0, x1),
            (L.incl_matrix(ring, x0, y1) - L.frob_matrix(ring, params, x0, y1, q)) % ring.modulus,
        ], axis=0)
        top = np.concatenate([L.d_matrix(ring, params, x1, x2), ring.zeros(len(x2), len(y1))], axis=1)
        bot = np.concatenate([
            (L.incl_matrix(ring, x1, y2) - L.frob_matrix(ring, params, x1, y2, q)) % ring.modulus,
            (-L.d_matrix(ring, params, y1, y2)) % ring.modulus,
        ], axis=1)
        return d0, np.concatenate([top, bot], axis=0)

    def fil_term(self, deg: int, r: int, i: int, zero_from: int | None = None) -> L.Term:
        """fil_i, enlarged by the full module at the X-degree 0 points from position zero_from on."""
        t = self.term(deg, r, i)
        if zero_from is None:
            return t
        extra = [pt for k, pt in enumerate(self.pts) if pt[0] == 0 and k >= zero_from]
        ex = L.make_term(self.params, extra, deg, "I", r=r, i=0)
        best = dict(zip(t.keys, t.exps))
        for key, c in zip(ex.keys, ex.exps):
            best[key] = min(c, best.get(key, c))
        keys = [k for k in self.term(deg, r, 0).keys if k in best]
        return L.Term(keys, [best[k] for k in keys])

    def fil_gens(self, amb, i: int, zero_from: int | None = None):
        """fil_i in degrees q-2 and q-1, as columns in ambient coordinates."""
        ring, q = self.ring, self.q
        g0 = L.incl_matrix(ring, self.fil_term(q - 2, 2, i, zero_from), amb["x0"])
        gx = L.incl_matrix(ring, self.fil_term(q - 1, 1, i, zero_from), amb["x1"])
        gy = L.incl_matrix(ring, self.fil_term(q - 2, 0, i, zero_from), amb["y1"])
        g1 = np.zeros((gx.shape[0] + gy.shape[0], gx.shape[1] + gy.shape[1]), dtype=gx.dtype)
        g1[: gx.shape[0], : gx.shape[1]] = gx
        g1[gx.shape[0]:, gx.shape[1]:] = gy
        return g0, g1


def _prop3_block(params: TruncationParams, pts, q: int, levels: Iterable[int], ring: Ring) -> dict:
    """{(m, b): (gr H^(q-1) length, H^(q-2)(gr) length)} for the block points with m in levels.

    A point of positive X-degree m is the graded piece fil_m / fil_(m+1).  The X-degree 0
    points of a block are separated by position: the stages fil_1 + (points k, k+1, ...)
    are subcomplexes since the Frobenius moves position k to k+1.
    """
    blk = _Block(list(pts), q, params, ring)
    amb = blk.ambient()
    d0, d1 = blk.differentials(amb)
    n1 = d1.shape[1]
    B = d0 if d0.shape[1] else ring.zeros(n1, 0)
    want = set(levels)
    stages = {}
    for k, (m, b) in enumerate(blk.pts):
        if m not in want:
            continue
        stages[(m, b)] = ((1, k), (1, k + 1)) if m == 0 else ((m, None), (m + 1, None))
    fils = {st: blk.fil_gens(amb, *st) for pair in stages.values() for st in pair}
    cocycles, acc = {}, ring.prec
    for st, (_g0, g1) in fils.items():
        if g1.shape[1]:
            ker, a = zp_kernel(ring, ring.matmul(d1, g1), True)
            cocycles[st] = ring.matmul(g1, ker)
            acc = min(acc, a)
        else:
            cocycles[st] = ring.zeros(n1, 0)
    pres = {}
    for pt, (st, st_next) in stages.items():
        g0, g0n = fils[st][0], fils[st_next][0]
        if g0.shape[1]:
            # H^(q-2) of the graded piece: x in the stage with dx in the next one (degree q-3 is zero)
            pre, a = zp_preimage(ring, ring.matmul(d0, g0), fils[st_next][1], True)
            pres[pt] = (ring.matmul(g0, pre), g0n)
            acc = min(acc, a)
    # Z_p-kernels are only accurate to p^acc; measure lengths there
    lo = Ring(ring.p, acc)
    red = lambda a: a % lo.modulus
    zlen = {st: span_length(lo, red(_cat(ring, n1, z, B))) for st, z in cocycles.items()}
    out = {}
    for pt, (st, st_next) in stages.items():
        h = quotient_length(lo, *map(red, pres[pt])) if pt in pres else 0
        out[pt] = (zlen[st] - zlen[st_next], h)
    return out


@dataclass
class GradedComparison:
    """Per-multidegree (computed, formula) pairs for one graded piece."""

    label: str
    pairs: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c == f for c, f in self.pairs.values())

    def mismatches(self) -> dict:
        return {b: cf for b, cf in self.pairs.items() if cf[0] != cf[1]}

    def to_json(self) -> dict:
        return {"label": self.label, "verdict": "MATCH" if self.ok else "MISMATCH",
                "pairs": [[list(b), c, f] for b, (c, f) in sorted(self.pairs.items())]}


def prop3_formula(i: int, q: int, params: TruncationParams) -> StructureDescriptor:
    """The case list for gr_i H^(q-1) of the modified complex."""
    e, p = params.e, params.p
    if i < 0:
        raise ValueError("i >= 0 is required")
    dx_tag = f"X^{i - 1}dX^"
    x_tag = f"X^{i}"
    if i == 0 or i > 2 * e:
        return ZERO
    if i == 2 * e:
        return descriptor(Atom("ZfrakQuotient", (q - 3, 0, 0, 1), dx_tag))
    if e < i < 2 * e:
        return descriptor(Atom("ZfrakQuotient", (q - 2, 0, 0, 1), x_tag),
                          Atom("ZfrakQuotient", (q - 3, 0, 0, 1), dx_tag))
    if i == e:
        zf = Atom("ZfrakQuotient", (q - 3, 0, 1, 2), dx_tag)
        if e % p == 0:
            return descriptor(Atom("ZfrakQuotient", (q - 2, 0, 0, 1), x_tag), zf, note="p | e branch")
        return descriptor(zf)
    eta, eta2 = eta_indices(i, e, p)
    a = max(eta2 - _v(i, p), 0)
    return descriptor(Atom("ZfrakQuotient", (q - 2, a, eta, 2), x_tag),
                      Atom("ZfrakQuotient", (q - 3, 0, eta, 2), dx_tag))


def prop3_computed(params: TruncationParams, q: int | None = None, levels: Iterable[int] | None = None,
                   ext: int = 1) -> dict:
    """{i: {b: (gr_i H^(q-1) length, H^(q-2)(gr_i) length)}} for b in the window.

    Each multidegree b is read off the orbit block containing the point (i, b);
    blocks are built on the extended T-window (guard band).  On X-degree 0 chains
    the truncation leaves spurious classes in the top half of the chain, so those
    get a guard band longer than the window itself.
    """
    q = params.q if q is None else q
    _check_p_nmid_e(params)
    levels = list(range(0, 2 * params.e + 2)) if levels is None else list(levels)
    ring = Ring(params.p, params.work_prec)
    W, p = params.win, params.p
    ext0 = max(ext, _log_ceil(W, p) + 1)
    inner = set(window_degrees(params))
    out = {i: {} for i in levels}
    blocks = [blk for blk in L.orbit_blocks(params, win=W * p**ext) if blk.base[0] > 0]
    if 0 in out:
        blocks += [blk for blk in L.orbit_blocks(params, win=W * p**ext0) if blk.base[0] == 0]
    for blk in blocks:
        hit = [(m, b) for m, b in blk.points if m in out and b in inner]
        if not hit:
            continue
        res = _prop3_block(params, blk.points, q, [m for m, _ in hit], ring)
        for m, b in hit:
            out[m][b] = res[(m, b)]
    return out


def _log_ceil(n: int, p: int) -> int:
    k = 0
    while p**k < n:
        k += 1
    return k


def prop3_compare(params: TruncationParams, q: int | None = None, levels=None) -> list[GradedComparison]:
    q = params.q if q is None else q
    comp = prop3_computed(params, q, levels)
    out = []
    for i, per_b in sorted(comp.items()):
        form = window_dims(prop3_formula(i, q, params), params)
        out.append(GradedComparison(f"gr_{i} H^{q - 1}", {b: (v[0], form[b]) for b, v in per_b.items()}))
    return out


def prop3_vanishing(params: TruncationParams, q: int | None = None, levels=None) -> dict:
    """{i: total length of H^(q-2)(gr_i)} over the window; all zero per the vanishing statement."""
    comp = prop3_computed(params, q, levels)
    return {i: sum(v[1] for v in per_b.values()) for i, per_b in comp.items()}


# --- the pi-filtration on Omega_A^q --------------------------------------------


def pi_filtration(params: TruncationParams, i: int, q: int, b: tuple, ring: Ring | None = None) -> np.ndarray:
    """fil_i Omega_A^q at T-degree b, as columns in (n, label) coordinates."""
    ring = Ring(params.p, params.work_prec) if ring is None else ring
    return OmegaAModule(params, [b], q, ring).filtration(i)


def pi_graded(params: TruncationParams, i: int, q: int, b: tuple, ring: Ring | None = None) -> FinModule:
    """gr_i Omega_A^q at degree b as a FinModule (generators fil_i, relations fil_(i+1) + torsion)."""
    ring = Ring(params.p, params.work_prec) if ring is None else ring
    mod = OmegaAModule(params, [b], q, ring)
    return _subquotient(ring, mod.filtration(i), _cat(ring, len(mod), mod.filtration(i + 1), mod.relations(with_pd=False)))


def _subquotient(ring: Ring, num: np.ndarray, den: np.ndarray) -> FinModule:
    """(num + den) / den presented on the columns of num."""
    n = num.shape[0]
    ker = kernel(ring, np.concatenate([num, (-den) % ring.modulus], axis=1)) if num.shape[1] else ring.zeros(0, 0)
    rel = ker[: num.shape[1], :] if ker.size else ring.zeros(num.shape[1], 0)
    return FinModule(ring, num.shape[1], rel)


def prop4_formula(j: int, q: int, params: TruncationParams) -> StructureDescriptor:
    e = params.e
    if j < 0:
        raise ValueError("j >= 0 is required")
    if j == 0:
        return descriptor(Atom("OmegaK", (q,)))
    if j < e:
        return descriptor(Atom("OmegaK", (q,)), Atom("OmegaK", (q - 1,)))
    return descriptor(Atom("OmegaModB", (q, j // e)))


def prop4_computed(params: TruncationParams, j: int, q: int) -> dict:
    """{b: length of gr_j(Omega_A^q / p d Omega_A^(q-1))} over the window."""
    _check_p_nmid_e(params)
    ring = Ring(params.p, params.work_prec)
    if j + 1 >= params.e * ring.prec:
        raise HypothesisError("filtration depth exceeds the working precision")
    out = {}
    for b in window_degrees(params):
        mod = OmegaAModule(params, [b], q, ring)
        rel = mod.relations(with_pd=True)
        n = len(mod)
        out[b] = (span_length(ring, _cat(ring, n, mod.filtration(j), rel))
                  - span_length(ring, _cat(ring, n, mod.filtration(j + 1), rel)))
    return out


def prop4_compare(params: TruncationParams, j: int, q: int) -> GradedComparison:
    comp = prop4_computed(params, j, q)
    form = window_dims(prop4_formula(j, q, params), params)
    return GradedComparison(f"gr_{j} Omega_A^{q}/pd", {b: (comp[b], form[b]) for b in comp})


# --- reference formulas for gr_n K_q(K) ---------------------------------------------------------


CASES = ("i", "ii", "iii", "iv", "v", "vi", "vii")


def _coker_case(n: int, q: int, p: int, variant: str = "plain") -> StructureDescriptor:
    s = _v(n, p)
    return descriptor(Atom("CokerCartier", (q, s, n // p**s, variant)))


def _case_iv(n: int, q: int, e: int, p: int) -> StructureDescriptor:
    bound_num = e * p  # n < ep/(p-1), boundary n = ep/(p-1)
    if n < 1:
        raise HypothesisError("n >= 1 is required")
    if n * (p - 1) < bound_num:
        return _coker_case(n, q, p)
    if n * (p - 1) == bound_num:
        return _coker_case(n, q, p, "1+aC")
    raise HypothesisError(f"n <= ep/(p-1) is required (got n={n}, e={e}, p={p})")


def reference_gr(case_id: str, n: int, q: int, params: TruncationParams) -> StructureDescriptor:
    """Closed-form descriptor of gr_n K_q(K) for the listed cases."""
    p, e = params.p, params.e
    if case_id not in CASES:
        raise ValueError(f"unknown case {case_id!r}")
    if case_id == "i":
        if n != 0:
            raise HypothesisError("case (i) describes gr_0 only")
        return descriptor(Atom("KMilnor", (q,)), Atom("KMilnor", (q - 1,)))
    if n < 1:
        raise HypothesisError("n >= 1 is required")
    if case_id == "ii":
        return descriptor(Atom("OmegaK", (q - 1,)))
    if case_id == "iii":
        return _coker_case(n, q, p)
    if case_id == "iv":
        return _case_iv(n, q, e, p)
    if case_id == "v":
        if e != 1:
            raise HypothesisError("case (v) needs e = 1")
        return descriptor(Atom("OmegaModB", (q - 1, n - 1)))
    if case_id == "vi":
        if p <= 2:
            raise HypothesisError("p > 2 is required")
        if e % p == 0:
            raise HypothesisError("p ∤ e is required")
        if n * (p - 1) <= e * p:
            return _case_iv(n, q, e, p)
        l, s = vi_indices(n, e, p)
        return descriptor(Atom("OmegaModB", (q - 1, l + s)))
    # case (vii): K = K_0((pT)^(1/p)), so e = p and q = 2
    if q != 2:
        raise HypothesisError("case (vii) needs q = 2")
    if p == 2:
        raise HypothesisError("p ≠ 2 is required")
    if n <= p:
        return _case_iv(n, q, p, p)
    if n == 2 * p:
        return descriptor(Atom("KModKp"))
    if n % p == 0 and n // p >= 3:
        return descriptor(Atom("KPower", (n // p - 2,)))
    return ZERO


# --- gr_n K_q via exp_p and psi ------------------------------------------------------------------


def gr_kq_computed(params: TruncationParams, n: int, q: int | None = None, ext: int = 1) -> dict:
    """{b: length} of gr_(n-e)(Omega_A^(q-1)/pd) modulo the psi-image, per multidegree.

    The kernel K = im psi + relations is intersected with fil_i globally (psi
    does not respect the filtration) and only then graded.  Multidegree b gets
    the generators of fil_i supported at b.
    """
    from .syntomic import ChainContext, chain_bases

    q = params.q if q is None else q
    e = params.e
    i = n - e
    if i < 1:
        raise HypothesisError(f"n > e is required (got n={n}, e={e})")
    _check_p_nmid_e(params)
    qparams = params.replace(q=q) if q != params.q else params
    out = {}
    for base in chain_bases(qparams):
        ctx = ChainContext(qparams, base, ext)
        ring = ctx.ring
        nF = len(ctx.f_keys)
        rel = ctx.f_relations()
        K = _cat(ring, nF, ctx.psi_image(), rel)
        fil_i = _cat(ring, nF, ctx.f_filtration(i), rel)
        den = _cat(ring, nF, ctx.f_filtration(i + 1), rel, intersection(ring, K, fil_i))
        gens = ctx.f_filtration(i)
        for b in ctx.inner:
            sup = ctx.fmod.support([b])
            local = intersection(ring, gens, sup) if gens.shape[1] else gens
            out[b] = quotient_length(ring, local, den)
    return out


def gr_kq_compare(params: TruncationParams, n: int, q: int | None = None, case_id: str | None = None) -> GradedComparison:
    q = params.q if q is None else q
    case_id = case_id or ("v" if params.e == 1 else "vi")
    comp = gr_kq_computed(params, n, q)
    form = window_dims(reference_gr(case_id, n, q, params), params)
    return GradedComparison(f"gr_{n} K_{q} vs ({case_id})", {b: (comp[b], form[b]) for b in sorted(comp)})

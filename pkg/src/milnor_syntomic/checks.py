"""Named verification suites shared by the CLI and the acceptance tests.

Each suite returns a list of Check records; a suite passes when every check
does.  All randomness comes from one seeded random.Random, so two runs with the
same seed and parameters give identical reports.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import complexes as C
from . import graded as G
from . import syntomic as Sy
from .base_rings import BElem, random_belem
from .linalg import Ring
from .params import TruncationParams
from .pd_envelope import PDElem, PDIdealSpec, frobenius_D, ideal_generators, pd_power, w_coordinates

SUITES = ("identities", "exactness", "prop3", "prop4", "frobenius")


@dataclass
class Check:
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "ok": bool(self.ok), "detail": self.detail}


# --- identities: s_q o E_q = -id and the worked q = 2 example ------------------------------


def sq_identity_check(params: TruncationParams, q: int, rng: random.Random, samples: int = 100) -> Check:
    failures = 0
    for _ in range(samples):
        x = Sy.random_uxelem(params, rng, q=q)
        if not Sy.sq_identity_defect(x).is_zero():
            failures += 1
    return Check(f"s_{q} o E_{q} = -id", failures == 0, {"samples": samples, "failures": failures, "q": q})


def worked_example_check(params: TruncationParams, rng: random.Random, samples: int = 20) -> Check:
    """s_2(E_2(a dT/T)) = -a dT/T for random a of positive X-order."""
    failures = 0
    lab = (0,)
    for _ in range(samples):
        a = BElem.monomial(params, rng.randrange(1, params.p**params.n_prec), xdeg=rng.randint(1, 4),
                           tdeg=tuple(rng.randint(-2, 2) for _ in range(params.m_pbase)))
        x = Sy.UXElem(params, 1, {lab: PDElem.from_b(a)}, {lab: "X"})
        lhs = Sy.s_q(Sy.E_q(x), params)
        if lhs != -x.series():
            failures += 1
    return Check("s_2(E_2(a dT/T)) = -a dT/T", failures == 0, {"samples": samples, "failures": failures})


def suite_identities(params: TruncationParams, rng: random.Random, samples: int = 100) -> list[Check]:
    out = [sq_identity_check(params, params.q, rng, samples)]
    if params.q == 2 and params.m_pbase >= 1:
        out.append(worked_example_check(params, rng))
    return out


# --- exactness: the exp_p/psi sequence per chain and the mapping-fiber long exact sequence ---------------


def les_check(rng: random.Random, samples: int = 50, p: int = 5, prec: int = 2) -> Check:
    ring = Ring(p, prec)
    failures = 0
    for _ in range(samples):
        src = C.random_complex(ring, rng, 4, 6)
        tgt = C.random_complex(ring, rng, 4, 6)
        f = C.random_chain_map(src, tgt, rng)
        if not C.les_exact(C.mapping_fiber_sequence(f)):
            failures += 1
    return Check(f"mapping-fiber LES exact over Z/{p**prec}", failures == 0, {"samples": samples, "failures": failures})


def sequence_check(params: TruncationParams) -> Check:
    bad = []
    ker_total = im_total = 0
    for base in Sy.chain_bases(params):
        rep = Sy.sequence_exactness(Sy.ChainContext(params, base))
        ker_total += rep.ker_length
        im_total += rep.im_length
        if not rep.ok:
            bad.append(list(base))
    return Check("exp_p o psi = 0 and ker exp_p = im psi", not bad,
                 {"chains": len(Sy.chain_bases(params)), "ker_length": ker_total, "im_length": im_total,
                  "failing_chains": bad})


def suite_exactness(params: TruncationParams, rng: random.Random) -> list[Check]:
    return [les_check(rng), sequence_check(params)]


# --- the X- and pi-filtration graded pieces ------------------------------------------------------------------


def prop3_checks(params: TruncationParams, q: int) -> list[Check]:
    e = params.e
    comp = G.prop3_computed(params, q, range(0, 2 * e + 3))
    h = {i: sum(v[1] for v in per_b.values()) for i, per_b in comp.items()}
    out = [Check(f"H^{q - 2}(gr_i S_{q}) = 0, 0 <= i <= {2 * e + 2}", all(v == 0 for v in h.values()),
                 {"q": q, "e": e, "lengths": {str(i): v for i, v in sorted(h.items())}})]
    for i in range(0, 2 * e + 2):
        form = G.window_dims(G.prop3_formula(i, q, params), params)
        cmp = G.GradedComparison(f"gr_{i} H^{q - 1}", {b: (v[0], form[b]) for b, v in comp[i].items()})
        mism = cmp.mismatches()
        out.append(Check(f"prop3 gr_{i} (e={e}, q={q})", cmp.ok,
                         {"formula": str(G.prop3_formula(i, q, params)),
                          "computed_total": sum(c for c, _ in cmp.pairs.values()),
                          "formula_total": sum(f for _, f in cmp.pairs.values()),
                          "mismatches": len(mism)}))
    return out


def prop4_checks(params: TruncationParams, q: int) -> list[Check]:
    out = []
    for j in range(0, 3 * params.e + 1):
        cmp = G.prop4_compare(params, j, q)
        out.append(Check(f"prop4 gr_{j} (e={params.e}, q={q})", cmp.ok,
                         {"formula": str(G.prop4_formula(j, q, params)), "mismatches": len(cmp.mismatches())}))
    return out


# --- Frobenius containments -----------------------------------------------------------------


def frobenius_ideal_check(params: TruncationParams, rng: random.Random, r_max: int = 4, prec: int = 8) -> Check:
    """f(J^[r]) in p^r D, tested on generators times random B-coefficients in w-coordinates."""
    bad = []
    for r in range(r_max + 1):
        for g in ideal_generators(params, PDIdealSpec("J[r]", r), prec):
            b = random_belem(params, rng, 3, prec, max_x=5, max_t=3)
            img = w_coordinates(frobenius_D(g * PDElem.from_b(b)))
            if any(c % params.p**r for c in img.values()):
                bad.append(r)
    return Check(f"f(J^[r]) in p^r D, r = 0..{r_max}", not bad, {"failing_r": sorted(set(bad))})


def frobenius_congruence_check(params: TruncationParams, rng: random.Random, samples: int = 200) -> Check:
    """f(x) = x^p mod p D for random x = b_0 + b_1 u in D."""
    p, N = params.p, params.n_prec
    failures = 0
    for _ in range(samples):
        x = PDElem(params, N, {j: random_belem(params, rng, 3, N, max_x=5, max_t=3) for j in (0, 1)})
        diff = frobenius_D(x) - pd_power(x, p)
        if any(c % p for c in w_coordinates(diff).values()):
            failures += 1
    return Check("f(x) = x^p mod p", failures == 0, {"samples": samples, "failures": failures})


def suite_frobenius(params: TruncationParams, rng: random.Random) -> list[Check]:
    return [frobenius_ideal_check(params, rng), frobenius_congruence_check(params, rng)]


def run_suite(name: str, params: TruncationParams, seed: int = 0, samples: int = 100) -> list[Check]:
    rng = random.Random(seed)
    if name == "identities":
        return suite_identities(params, rng, samples)
    if name == "exactness":
        return suite_exactness(params, rng)
    if name == "prop3":
        return prop3_checks(params, params.q)
    if name == "prop4":
        return prop4_checks(params, params.q)
    if name == "frobenius":
        return suite_frobenius(params, rng)
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")

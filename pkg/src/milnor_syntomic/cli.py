"""Command-line front end.

    milnor-syntomic grade --p 5 --e 2 --q 2 --n 6
    milnor-syntomic table --q 2 --n-max 10
    milnor-syntomic verify identities --seed 1
    milnor-syntomic complex --tdeg 1
    milnor-syntomic reference --case vii --n 10

Exit status is 0 iff every requested check passes, 1 if a check fails and 2
when the parameters violate a standing hypothesis.  JSON output follows
docs/cli_output.schema.json and is deterministic for fixed flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass

from . import graded as G
from .checks import SUITES, run_suite
from .params import HypothesisError, TruncationParams

COMMANDS = ("grade", "table", "verify", "complex", "reference")


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: TruncationParams
    n: int | None = None
    n_max: int | None = None
    fmt: str = "text"
    seed: int = 0
    suite: str | None = None
    case: str | None = None
    tdeg: tuple = (1,)
    samples: int = 100

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        params = TruncationParams(p=ns.p, e=ns.e, q=ns.q, n_prec=ns.precision, x_trunc=ns.x_trunc,
                                  pd_level=ns.pd_level, m_pbase=ns.pbase, win=ns.window, strict=ns.strict)
        tdeg = tuple(ns.tdeg) if getattr(ns, "tdeg", None) else (1,) + (0,) * (params.m_pbase - 1)
        return cls(ns.command, params, ns.n, ns.n_max, ns.format, ns.seed, getattr(ns, "suite", None),
                   getattr(ns, "case", None), tdeg, getattr(ns, "samples", 100))


def _default_case(params: TruncationParams) -> str:
    return "v" if params.e == 1 else "vi"


def _checkable(params: TruncationParams, n: int, case: str) -> bool:
    """gr_n K_q is computed for n > e; case (vi) proper starts above ep/(p-1)."""
    return case in ("v", "vi") and n > params.e and n * (params.p - 1) > params.e * params.p


def _descriptor_or_error(case: str, n: int, q: int, params: TruncationParams) -> dict:
    try:
        return G.reference_gr(case, n, q, params).to_json()
    except HypothesisError as exc:
        return {"error": str(exc)}


def _pairs_json(cmp: G.GradedComparison) -> list:
    return [[list(b), c, f] for b, (c, f) in sorted(cmp.pairs.items())]


# --- commands -------------------------------------------------------------------------------


def cmd_grade(cfg: RunConfig) -> tuple[dict, bool]:
    params, q = cfg.params, cfg.params.q
    n = 1 if cfg.n is None else cfg.n
    if n < 0:
        raise HypothesisError("n >= 0 is required")
    if n == 0:
        desc = G.reference_gr("i", 0, q, params)
        return {"n": 0, "q": q, "case": "i", "formula": desc.to_json(),
                "computed": {"applicable": False, "reason": "gr_0 is not computed"}, "verdict": "N/A"}, True
    case = cfg.case or _default_case(params)
    desc = G.reference_gr(case, n, q, params)
    report = {"n": n, "q": q, "case": case, "formula": desc.to_json()}
    if not _checkable(params, n, case):
        report["computed"] = {"applicable": False, "reason": "needs n > e and n(p-1) > ep"}
        report["verdict"] = "N/A"
        return report, True
    cmp = G.gr_kq_compare(params, n, q, case)
    report["computed"] = {"applicable": True, "pairs": _pairs_json(cmp), "mismatches": len(cmp.mismatches())}
    report["verdict"] = "MATCH" if cmp.ok else "MISMATCH"
    return report, cmp.ok


def cmd_table(cfg: RunConfig) -> tuple[dict, bool]:
    params, q = cfg.params, cfg.params.q
    case = cfg.case or _default_case(params)
    lo = 1 if cfg.n is None else cfg.n
    hi = 2 * params.p if cfg.n_max is None else cfg.n_max
    rows, ok = [], True
    for n in range(lo, hi + 1):
        row = {"n": n, "formula": _descriptor_or_error(case, n, q, params)}
        if "error" not in row["formula"] and _checkable(params, n, case):
            cmp = G.gr_kq_compare(params, n, q, case)
            row["computed_total"] = sum(c for c, _ in cmp.pairs.values())
            row["formula_total"] = sum(f for _, f in cmp.pairs.values())
            row["verdict"] = "MATCH" if cmp.ok else "MISMATCH"
            ok &= cmp.ok
        else:
            row["verdict"] = "N/A"
        rows.append(row)
    return {"q": q, "case": case, "rows": rows}, ok


def cmd_verify(cfg: RunConfig) -> tuple[dict, bool]:
    names = SUITES if cfg.suite in (None, "all") else (cfg.suite,)
    suites = []
    for name in names:
        checks = run_suite(name, cfg.params, cfg.seed, cfg.samples)
        suites.append({"suite": name, "ok": all(c.ok for c in checks), "checks": [c.to_json() for c in checks]})
    ok = all(s["ok"] for s in suites)
    return {"suites": suites}, ok


def cmd_complex(cfg: RunConfig) -> tuple[dict, bool]:
    from .complexes import complex_report
    from .syntomic import (ChainContext, build_modified, build_syntomic, build_syntomic_prime, chain_of,
                           sequence_exactness)

    params = cfg.params
    if len(cfg.tdeg) != params.m_pbase:
        raise HypothesisError(f"--tdeg needs {params.m_pbase} entries")
    base = chain_of(params, cfg.tdeg)
    ctx = ChainContext(params, base)
    complexes = {name: complex_report(build(ctx)) for name, build in
                 (("S", build_syntomic), ("S_prime", build_syntomic_prime), ("S_modified", build_modified))}
    rep = sequence_exactness(ctx)
    return {"chain_base": list(base), "chain": [list(b) for b in ctx.chain], "complexes": complexes,
            "exactness": {"composite_zero": rep.composite_zero, "ker_length": rep.ker_length,
                         "im_length": rep.im_length, "ok": rep.ok}}, rep.ok


def cmd_reference(cfg: RunConfig) -> tuple[dict, bool]:
    params, q = cfg.params, cfg.params.q
    n = 0 if cfg.n is None else cfg.n
    cases = G.CASES if cfg.case in (None, "all") else (cfg.case,)
    return {"n": n, "q": q, "descriptors": {c: _descriptor_or_error(c, n, q, params) for c in cases}}, True


HANDLERS = {"grade": cmd_grade, "table": cmd_table, "verify": cmd_verify, "complex": cmd_complex,
            "reference": cmd_reference}


# --- output ---------------------------------------------------------------------------------


def _text(cfg: RunConfig, body: dict, ok: bool) -> str:
    lines = []
    if cfg.command == "grade":
        lines.append(f"gr_{body['n']} K_{body['q']}  case ({body['case']})")
        lines.append(f"  formula : {body['formula']['text']}")
        comp = body["computed"]
        if comp["applicable"]:
            lines.append(f"  computed: {len(comp['pairs'])} multidegrees, {comp['mismatches']} mismatches")
        else:
            lines.append(f"  computed: n/a ({comp['reason']})")
        lines.append(f"  verdict : {body['verdict']}")
    elif cfg.command == "table":
        lines.append(f"case ({body['case']}), q = {body['q']}")
        for row in body["rows"]:
            f = row["formula"]
            text = f.get("text", f.get("error"))
            extra = f"  [{row['computed_total']}/{row['formula_total']}]" if "computed_total" in row else ""
            lines.append(f"  n={row['n']:>3}  {text:<40} {row['verdict']}{extra}")
    elif cfg.command == "verify":
        for s in body["suites"]:
            lines.append(f"[{'PASS' if s['ok'] else 'FAIL'}] {s['suite']}")
            for c in s["checks"]:
                lines.append(f"    {'ok  ' if c['ok'] else 'FAIL'} {c['name']}")
    elif cfg.command == "complex":
        lines.append(f"T-chain {body['chain']}")
        for name, rep in body["complexes"].items():
            lines.append(f"  {name:<11} ranks {rep['ranks']}  H^* {rep['cohomology']}")
        t2 = body["exactness"]
        lines.append(f"  exp_p/psi sequence on this chain: {'exact' if t2['ok'] else 'NOT exact'}"
                     f" (ker {t2['ker_length']}, im {t2['im_length']})")
    else:
        for case, d in body["descriptors"].items():
            lines.append(f"  ({case}) {d.get('text', d.get('error'))}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=5)
    common.add_argument("--e", type=int, default=2)
    common.add_argument("--q", type=int, default=2)
    common.add_argument("--n", type=int, default=None)
    common.add_argument("--n-max", type=int, default=None)
    common.add_argument("--precision", type=int, default=3, help="p-adic precision N")
    common.add_argument("--x-trunc", type=int, default=30, help="X-degree bound M")
    common.add_argument("--pd-level", type=int, default=6, help="divided-power level L")
    common.add_argument("--pbase", type=int, default=1, help="number of p-base variables")
    common.add_argument("--window", type=int, default=25, help="T-degree window W")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--strict", action="store_true", help="flag truncation drops as errors")

    parser = argparse.ArgumentParser(prog="milnor-syntomic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("grade", parents=[common], help="gr_n K_q: computed vs reference formula") \
        .add_argument("--case", choices=("v", "vi"), default=None)
    sub.add_parser("table", parents=[common], help="one row per n") \
        .add_argument("--case", choices=G.CASES, default=None)
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=SUITES + ("all",))
    v.add_argument("--samples", type=int, default=100, help="random inputs for the identities suite")
    sub.add_parser("complex", parents=[common], help="syntomic complexes on one T-chain") \
        .add_argument("--tdeg", type=int, nargs="+", default=None)
    sub.add_parser("reference", parents=[common], help="reference descriptors") \
        .add_argument("--case", choices=G.CASES + ("all",), default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_args(ns)
        body, ok = HANDLERS[cfg.command](cfg)
    except HypothesisError as exc:
        if ns.format == "json":
            print(json.dumps({"command": ns.command, "ok": False, "error": str(exc)}, sort_keys=True))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg.fmt == "json":
        out = {"command": cfg.command, "ok": ok, "seed": cfg.seed, "params": asdict(cfg.params), **body}
        print(json.dumps(out, sort_keys=True, indent=2))
    else:
        print(_text(cfg, body, ok))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

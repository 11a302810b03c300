"""Command-line front end: inspect, tower, kida and tate.

Exit codes: 0 success, 2 invalid input, 3 fast/oracle disagreement,
4 precision exhausted, 5 Kida identity or hypotheses failed.
"""

from __future__ import annotations

import argparse
import json
import sys

from .cohomology import herbrand_quotient, load_module, tate
from .errors import (DegreeCapError, HypothesisError, IwtowerError, PrecisionError)
from .kida import evaluate_morphism, load_morphism
from .links import hosokawa_at_1, laurent_to_str, linking_matrix, load_link, multivariable_alexander
from .tower import load_tower, tower_report

EXIT_OK, EXIT_INPUT, EXIT_DISAGREE, EXIT_PRECISION, EXIT_KIDA = 0, 2, 3, 4, 5


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False))
    elif not args.quiet:
        print(text)


def cmd_inspect(args) -> int:
    link = load_link(args.link)
    payload = {
        "schema": "1",
        "name": link.name,
        "components": link.names(),
        "generators": len(link.generators),
        "relators": len(link.relators),
    }
    try:
        lk = linking_matrix(link)
        payload["linking_matrix"] = lk
        payload["hosokawa_at_1"] = abs(hosokawa_at_1(lk)) if link.d >= 2 else None
    except IwtowerError as exc:
        payload["linking_matrix"] = None
        payload["hosokawa_at_1"] = None
        payload["linking_note"] = str(exc)
    try:
        payload["alexander"] = laurent_to_str(multivariable_alexander(link), link.d)
    except DegreeCapError as exc:
        payload["alexander"] = None
        payload["alexander_note"] = str(exc)
    lines = [
        f"link        {link.name or args.link}",
        f"components  {link.d} ({', '.join(link.names())})",
        f"presentation {payload['generators']} generators, {payload['relators']} relators",
    ]
    if payload["linking_matrix"] is not None:
        lines.append("linking matrix")
        lines += ["  " + " ".join(f"{x:3d}" for x in row) for row in payload["linking_matrix"]]
        if payload["hosokawa_at_1"] is not None:
            lines.append(f"|H_L(1)|    {payload['hosokawa_at_1']}")
    lines.append(f"Alexander   {payload['alexander']}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _fmt(x) -> str:
    return "-" if x is None else str(x)


def cmd_tower(args) -> int:
    overrides = {"p": args.p, "precision": args.prec, "truncation": args.trunc}
    spec = load_tower(args.tower, overrides=overrides)
    report = tower_report(spec, levels=args.levels, oracle_max=args.oracle_max)
    lines = [f"tower {report['name']}  p = {report['p']}  tau = {report['tau']}",
             f"Delta_(L,tau) = {report['reduced_alexander']}",
             f"base level {report['base_level']} (exponents are relative to it)",
             f"{'n':>3} {'p^n':>5} {'oracle H_1':<28} {'oracle':>7} {'fast':>7}  QHS3"]
    for row, q in zip(report["ladder"], report["qhs3"]):
        lines.append(f"{row['level']:>3} {row['degree']:>5} {_fmt(row['group']):<28} "
                     f"{_fmt(row['oracle_exponent']):>7} {_fmt(row['fast_exponent']):>7}  {_fmt(q)}")
    inv = report["invariants"]
    if inv:
        lines.append(f"lambda = {inv['lambda']}  mu = {inv['mu']}  nu = {inv['nu']}  (exact from n = {inv['n0']})")
    else:
        lines.append(f"invariants suppressed: {report.get('note', '')}")
    if not report["paths_agree"]:
        lines.append("ERROR: oracle and resultant paths disagree")
    _emit(args, report, "\n".join(lines))
    return EXIT_OK if report["paths_agree"] else EXIT_DISAGREE


def cmd_kida(args) -> int:
    m = load_morphism(args.morphism)
    verdict = evaluate_morphism(m, args.lambda_target, args.lambda_source)
    payload = {"schema": "1", "name": m.name, "degree": m.degree, "p": m.prime, **verdict.to_json()}
    lines = [f"morphism {m.name}  degree {m.degree}  p = {m.prime}",
             f"lambda_N - 1 = {verdict.lhs}",
             f"deg(f)(lambda_M - 1) + sum(e_w - 1) = {verdict.degree_term} + {verdict.branch_term} = {verdict.rhs}",
             f"residual {verdict.residual}"]
    if verdict.hbar is not None:
        lines.append(f"hbar_2 - hbar_1 = {verdict.hbar} (expected {verdict.hbar_expected})")
    lines.append("degree accounting " + ("ok" if verdict.accounting_ok else f"FAILED {verdict.accounting}"))
    lines.append("hypotheses")
    lines += [f"  [{'x' if ok else ' '}] {k}" for k, ok in verdict.hypotheses.items()]
    lines.append("inputs")
    lines += [f"  {k}: {v}" for k, v in verdict.inputs.items()]
    lines.append("PASS" if verdict.passed else "FAIL")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if verdict.passed else EXIT_KIDA


def cmd_tate(args) -> int:
    M = load_module(args.module)
    g = tate(M, args.i)
    q = herbrand_quotient(M)
    payload = {"schema": "1", "m": M.m, "i": args.i, "invariant_factors": list(g.invariant_factors),
               "group": str(g), "herbrand_quotient": str(q)}
    _emit(args, payload, f"H^{args.i}(Z/{M.m}, A) = {g}\nHerbrand quotient q(A) = {q}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--quiet", action="store_true", help="suppress the text report")
    ap = argparse.ArgumentParser(prog="iwtower", description="Iwasawa invariants of branched Z_p-cover towers")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("inspect", parents=[common], help="link invariants")
    p.add_argument("link", help="link file or corpus name")
    p.set_defaults(func=cmd_inspect)
    p = sub.add_parser("tower", parents=[common], help="homology ladder and Iwasawa invariants")
    p.add_argument("tower", help="tower file or corpus name")
    p.add_argument("--p", type=int, help="override the prime")
    p.add_argument("--prec", type=int, help="p-adic working precision")
    p.add_argument("--trunc", type=int, help="power-series truncation order")
    p.add_argument("--levels", type=int, help="number of levels (>= 2)")
    p.add_argument("--oracle-max", type=int, help="largest cover degree for the brute-force oracle")
    p.set_defaults(func=cmd_tower)
    p = sub.add_parser("kida", parents=[common], help="check Kida's formula for a morphism")
    p.add_argument("morphism", help="morphism file or corpus name")
    p.add_argument("--lambda-target", type=int, help="assert lambda of the target tower")
    p.add_argument("--lambda-source", type=int, help="assert lambda of the source tower")
    p.set_defaults(func=cmd_kida)
    p = sub.add_parser("tate", parents=[common], help="Tate cohomology of a cyclic-group module")
    p.add_argument("module", help="module file or corpus name")
    p.add_argument("-i", type=int, default=0, help="cohomological degree")
    p.set_defaults(func=cmd_tate)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PrecisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except HypothesisError as exc:
        if args.command == "kida":
            print(f"FAIL: hypothesis not met: {exc}", file=sys.stderr)
            return EXIT_KIDA
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IwtowerError, ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

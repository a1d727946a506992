"""Command-line harness.

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from sbpquad.endcorrect import solve_rule, verify_conditions, verify_prop2
from sbpquad.errors import InfeasibleError, UnsupportedOperation
from sbpquad.operators import OperatorFamily, build_operator, verify_sbp_structure
from sbpquad.studies import (
    DEFAULT_N,
    emit_report,
    evaluate,
    plot_data,
    study_div2d,
    study_quad1d,
    study_quad2d,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _family(text: str) -> OperatorFamily:
    try:
        return OperatorFamily.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _n_list(text: str) -> list[int]:
    try:
        ns = [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--n-list expects comma-separated integers, got {text!r}") from None
    if not ns or any(b <= a for a, b in zip(ns, ns[1:])):
        raise argparse.ArgumentTypeError(f"--n-list must be non-empty and strictly increasing, got {text!r}")
    return ns


def _pin(text: str) -> tuple[int, Fraction]:
    try:
        idx, val = text.split("=", 1)
        return int(idx), Fraction(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--pin expects INDEX=VALUE (e.g. 0=0 or 1=3/8), got {text!r}") from None


def _cmd_verify_op(args) -> int:
    fam = args.family
    op = build_operator(fam, max(16, 2 * fam.r))
    ok = True
    if op.differentiable:
        report = verify_sbp_structure(op)
        print(report)
        ok &= report.passed
    else:
        print(f"{fam}: quadrature weights only, no difference operator to check")
    cond = verify_conditions(op.sigma, fam.r, fam.order)
    print(f"{fam} {cond}")
    ok &= cond.passed
    if fam.is_diagonal:
        prop = verify_prop2(op.sigma, fam.s, op.alpha)
        print(f"{fam} {prop}")
        ok &= prop.passed
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_gen_rule(args) -> int:
    try:
        rule = solve_rule(args.r, args.q, args.pin)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = verify_conditions(rule.sigma, rule.r, rule.q)
    if args.format == "json":
        text = json.dumps({"r": rule.r, "q": rule.q, "sigma": [str(x) for x in rule.sigma]}, indent=2) + "\n"
    else:
        text = "v,sigma,decimal\n" + "".join(f"{v},{x},{float(x):.17g}\n" for v, x in enumerate(rule.sigma))
    _write(text, args.out)
    print(report, file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _finish_study(records, args, extra_ok: bool = True) -> int:
    text = emit_report(records, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    if args.plot_data:
        with open(args.plot_data, "w", newline="") as fh:
            fh.write(plot_data(records))
    verdict = evaluate(records)
    for msg in verdict.messages:
        print(msg, file=sys.stderr)
    return EXIT_OK if verdict.passed and extra_ok else EXIT_FAIL


def _cmd_study_1d(args) -> int:
    return _finish_study(study_quad1d(args.family, args.n_list), args)


def _cmd_study_2d(args) -> int:
    if not args.family.is_diagonal or (args.metric_family and not args.metric_family.is_diagonal):
        raise UsageError("2-D studies need diagonal-norm families")
    return _finish_study(study_quad2d(args.family, args.metric_family, args.n_list), args)


def _cmd_study_div(args) -> int:
    if not args.family.is_diagonal:
        raise UsageError("the divergence study needs a diagonal-norm family")
    result = study_div2d(args.family, args.n_list)
    worst = max(result.residuals)
    identity_ok = worst < 1e-12
    print(f"max |volume - boundary| / field scale = {worst:.3e}: {'ok' if identity_ok else 'FAIL'}",
          file=sys.stderr)
    return _finish_study(result.records, args, identity_ok)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sbpquad", description="SBP operators and their quadrature rules")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-op", help="check an operator's SBP structure and quadrature conditions")
    p.add_argument("family", type=_family)
    p.set_defaults(func=_cmd_verify_op)

    p = sub.add_parser("gen-rule", help="synthesize an end-corrected trapezoid rule")
    p.add_argument("--r", type=int, required=True, help="number of corrected weights per end")
    p.add_argument("--q", type=int, required=True, help="order of accuracy")
    p.add_argument("--pin", type=_pin, action="append", default=[], metavar="V=VAL",
                   help="fix sigma_V to VAL (repeatable)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_gen_rule)

    def study(name: str, helptext: str, func):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--family", type=_family, required=True)
        sp.add_argument("--n-list", type=_n_list, default=list(DEFAULT_N))
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", default=None)
        sp.add_argument("--plot-data", default=None, metavar="PATH",
                        help="also write log10(h) vs log10|E_n| columns")
        sp.set_defaults(func=func)
        return sp

    study("study-1d", "1-D quadrature refinement study", _cmd_study_1d)
    sp = study("study-2d", "curvilinear 2-D quadrature refinement study", _cmd_study_2d)
    sp.add_argument("--metric-family", type=_family, default=None,
                    help="operator for the Jacobian derivatives (default: --family)")
    study("study-div", "discrete divergence theorem study", _cmd_study_div)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad usage
    try:
        return args.func(args)
    except (UsageError, UnsupportedOperation) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"{parser.prog}: I/O error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

    eulersums eval   "sum(H, alt)/n^5"
    eulersums reduce "sum(H^2, alt)/n^2"
    eulersums verify golden
    eulersums table --weight 6

Exit codes: 0 success, 1 verification failure (FAIL or DISCREPANCY),
2 usage or parse error, 3 tolerance unreachable, 4 reduction residual above
tolerance.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Sequence, TextIO

import mpmath

from .errors import DivergentError, EulerSumError, ExpansionExhausted, ToleranceUnreachable
from .model import StarIndex, make_sum, sum_to_star
from .numerics import PrecisionContext
from .parser import ParseError, parse, render, render_combo
from .reduction import format_value, reduce, residual_check
from .series import DEFAULT_MAX_TERMS, eval_star, evaluate
from .suite import SuiteError, run_suite, select, tolerance, write_discrepancies

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_UNREACHABLE = 3
EXIT_RESIDUAL = 4


@dataclass(frozen=True)
class CliConfig:
    digits: int = 30
    mode: str = "accel"
    max_terms: int = DEFAULT_MAX_TERMS
    allow_external_identities: bool = True
    output: str = "text"

    def __post_init__(self) -> None:
        if not 10 <= self.digits <= 50:
            raise ValueError("digits must be in 10..50")
        if self.max_terms < 1000:
            raise ValueError("max-terms must be at least 1000")
        if self.mode not in ("direct", "accel"):
            raise ValueError("mode must be direct or accel")

    @property
    def ctx(self) -> PrecisionContext:
        return PrecisionContext(self.digits)


def _sci(x) -> str:
    return mpmath.nstr(mpmath.mpf(x), 3, min_fixed=1, max_fixed=0)


def _parse_error(exc: ParseError, err: TextIO) -> int:
    print(f"error: {exc}", file=err)
    if exc.text:
        print(f"  {exc.text}", file=err)
        width = max(1, exc.span.end - exc.span.start)
        print("  " + " " * exc.span.start + "^" * width, file=err)
    return EXIT_USAGE


def _evaluate(e, cfg: CliConfig):
    if isinstance(e, StarIndex):
        return eval_star(e, cfg.ctx, cfg.mode, cfg.max_terms)
    return evaluate(e, cfg.ctx, cfg.mode, cfg.max_terms)


def cmd_eval(expr_text: str, cfg: CliConfig, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    try:
        e = parse(expr_text)
    except ParseError as exc:
        return _parse_error(exc, err)
    try:
        r = _evaluate(e, cfg)
    except (ToleranceUnreachable, ExpansionExhausted) as exc:
        print(f"error: tolerance unreachable: {exc}", file=err)
        return EXIT_UNREACHABLE
    except EulerSumError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    value = format_value(r.value, cfg.digits)
    if cfg.output == "json":
        doc = {
            "expr": render(e),
            "value": value,
            "error_bound": _sci(r.error_bound),
            "strategy": r.strategy.value,
            "terms_used": r.terms_used,
            "digits": cfg.digits,
            "mode": cfg.mode,
        }
        print(json.dumps(doc, sort_keys=True), file=out)
    else:
        print(f"{render(e)} = {value}", file=out)
        print(f"error bound: {_sci(r.error_bound)}", file=out)
        print(f"strategy: {r.strategy.value}", file=out)
        print(f"terms used: {r.terms_used}", file=out)
    return EXIT_OK


def cmd_reduce(expr_text: str, cfg: CliConfig, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    try:
        e = parse(expr_text)
    except ParseError as exc:
        return _parse_error(exc, err)
    red = reduce(e, allow_external_identities=cfg.allow_external_identities)
    try:
        lhs, rhs, residual = residual_check(red, cfg.ctx, cfg.mode)
    except (ToleranceUnreachable, ExpansionExhausted) as exc:
        print(f"error: tolerance unreachable: {exc}", file=err)
        return EXIT_UNREACHABLE
    tol = tolerance(cfg.digits)
    ok = residual < tol
    combo = render_combo(red.result)
    residual_term = None if red.residual is None else render(red.residual)
    if cfg.output == "json":
        doc = {
            "expr": render(e),
            "result": combo,
            "trace": list(red.trace),
            "residual_term": residual_term,
            "lhs": format_value(lhs.value, cfg.digits),
            "rhs": format_value(rhs.value, cfg.digits),
            "check_residual": _sci(residual),
            "tolerance": _sci(tol),
            "verified": bool(ok),
        }
        print(json.dumps(doc, sort_keys=True), file=out)
    else:
        print(f"{render(e)} = {combo}", file=out)
        print("trace: " + (" -> ".join(red.trace) if red.trace else "(none)"), file=out)
        if residual_term is not None:
            print(f"unreduced: {residual_term}", file=out)
        verdict = "ok" if ok else "FAILED"
        print(f"residual: {_sci(residual)} (tolerance {_sci(tol)}) {verdict}", file=out)
    return EXIT_OK if ok else EXIT_RESIDUAL


def cmd_verify(
    selector: str,
    cfg: CliConfig,
    digits: int | None = None,
    report_file: str | None = None,
    out: TextIO | None = None,
    err: TextIO | None = None,
) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    try:
        records = select(selector)
    except SuiteError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    report = run_suite(records, digits, cfg.mode, cfg.max_terms)
    if report_file:
        write_discrepancies(report, report_file)
    print(report.as_json() if cfg.output == "json" else report.text(), file=out)
    return EXIT_FAILED if _has_failures(report) else EXIT_OK


def _has_failures(report) -> bool:
    return any(r.status.value in ("FAIL", "DISCREPANCY") for r in report.reports)


# reference table shapes at weight 6: (factors, alternating, denominator offset from weight)
TABLE_SHAPES = (
    ([("H", 1, 1)], True, 1),
    ([("L", 1, 1)], False, 1),
    ([("L", 1, 1)], True, 1),
    ([("Z", 2, 1)], True, 2),
    ([("L", 2, 1)], False, 2),
    ([("H", 1, 2)], True, 2),
    ([("L", 1, 2)], True, 2),
    ([("L", 1, 2)], False, 2),
    ([("H", 1, 1), ("L", 1, 1)], False, 2),
    ([("H", 1, 1), ("L", 1, 1)], True, 2),
    ([("L", 1, 1), ("Z", 2, 1)], False, 3),
)


def table_rows(weight: int):
    """Reference table shapes moved to ``weight``; divergent ones skipped."""
    for factors, alt, offset in TABLE_SHAPES:
        try:
            e = make_sum(factors, alternating=alt, power=weight - offset)
        except (DivergentError, ValueError):
            continue
        yield e


def cmd_table(weight: int, cfg: CliConfig, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    rows = []
    for e in table_rows(weight):
        try:
            r = evaluate(e, cfg.ctx, cfg.mode, cfg.max_terms)
        except (ToleranceUnreachable, ExpansionExhausted) as exc:
            print(f"error: {render(e)}: tolerance unreachable: {exc}", file=err)
            return EXIT_UNREACHABLE
        star = sum_to_star(e)
        star_text = None
        if star is not None:
            s, sign = star
            star_text = ("-" if sign < 0 else "") + render(s)
        rows.append((render(e), star_text, format_value(r.value, cfg.digits), r.error_bound))
    if cfg.output == "json":
        doc = {
            "weight": weight,
            "digits": cfg.digits,
            "rows": [{"expr": a, "star": b, "value": v, "error_bound": _sci(eb)} for a, b, v, eb in rows],
        }
        print(json.dumps(doc, sort_keys=True), file=out)
    else:
        if not rows:
            print(f"no convergent table shapes at weight {weight}", file=out)
        for expr, star_text, value, _ in rows:
            label = f"{expr} = {star_text}" if star_text else expr
            print(f"{label} = {value}", file=out)
    return EXIT_OK


def _positive_digits(text: str) -> int:
    v = int(text)
    if not 10 <= v <= 50:
        raise argparse.ArgumentTypeError("digits must be in 10..50")
    return v


def _max_terms(text: str) -> int:
    v = int(text)
    if v < 1000:
        raise argparse.ArgumentTypeError("max-terms must be at least 1000")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=_positive_digits, default=None, help="working precision (10..50, default 30)")
    common.add_argument("--mode", choices=("direct", "accel"), default="accel")
    common.add_argument("--max-terms", type=_max_terms, default=DEFAULT_MAX_TERMS)
    common.add_argument("--json", action="store_true", help="emit a JSON document")
    common.add_argument(
        "--no-external-identities",
        action="store_true",
        help="disable catalog rules flagged external (classical results such as Euler's S_{1,q} formula)",
    )

    p = argparse.ArgumentParser(prog="eulersums", description="Euler sums: evaluate, reduce, verify.")
    sub = p.add_subparsers(dest="command", required=True)
    ev = sub.add_parser("eval", parents=[common], help="evaluate a sum or star value")
    ev.add_argument("expr")
    rd = sub.add_parser("reduce", parents=[common], help="reduce to constants and linear sums")
    rd.add_argument("expr")
    vf = sub.add_parser("verify", parents=[common], help="run identity checks")
    vf.add_argument("selector", help="all, exact, numeric, golden or an identity id")
    vf.add_argument("--report-file", default=None, help="write DISCREPANCY details here")
    tb = sub.add_parser("table", parents=[common], help="print the linear and quadratic table at a weight")
    tb.add_argument("--weight", type=int, required=True)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = CliConfig(
        digits=args.digits or 30,
        mode=args.mode,
        max_terms=args.max_terms,
        allow_external_identities=not args.no_external_identities,
        output="json" if args.json else "text",
    )
    if args.command == "eval":
        return cmd_eval(args.expr, cfg)
    if args.command == "reduce":
        return cmd_reduce(args.expr, cfg)
    if args.command == "verify":
        return cmd_verify(args.selector, cfg, args.digits, args.report_file)
    return cmd_table(args.weight, cfg)


if __name__ == "__main__":
    sys.exit(main())

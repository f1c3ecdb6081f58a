"""Machine verification of identity records.

Three kinds of record live in ``data/identities.txt``:

* ``exact``: finite-n identities, both sides rational, checked for n = 1..n_max;
* ``numeric``: infinite-series identities, both sides evaluated numerically;
* ``golden``: a single sum compared against a reference decimal value.

Every check yields a :class:`CheckReport`.  Numeric mismatches whose two
sides converged individually are reported as DISCREPANCY (never corrected);
evaluations that cannot reach the requested tolerance are UNREACHABLE.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import mpmath
from mpmath import mpf

from .errors import EulerSumError, ToleranceUnreachable
from .numerics import PrecisionContext
from .parser import parse, parse_combo
from .reduction import eval_combo, format_value
from .series import DEFAULT_MAX_TERMS, evaluate
from .templates import Term, TemplateError, evaluate as eval_expr, expand_params, instantiate, parse_ranges

SUITE_VERSION = 1
EXACT_N_MAX = 200
DEFAULT_DIGITS = 20
GOLDEN_DIGITS = 30
# significant digits a golden value must reproduce, per evaluation mode
GOLDEN_REQUIRED = {"accel": 25, "direct": 12}
DIRECT_GOLDEN_DIGITS = 13
# plain summation of the slowest table entry needs about 2.4e6 terms at 13 digits
DIRECT_GOLDEN_MAX_TERMS = 8_000_000


class SuiteError(EulerSumError, ValueError):
    pass


class Kind(str, enum.Enum):
    EXACT = "exact"
    NUMERIC = "numeric"
    GOLDEN = "golden"


class Status(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    DISCREPANCY = "DISCREPANCY"
    UNREACHABLE = "UNREACHABLE"


@dataclass(frozen=True)
class IdentityRecord:
    id: str
    kind: Kind
    title: str = ""
    params: tuple[tuple[str, tuple[int, ...]], ...] = ()
    digits: int | None = None
    lhs: tuple[Term, ...] = ()
    rhs: tuple[Term, ...] = ()
    expr: str = ""
    value: str = ""
    star: str = ""
    star_sign: int = 1

    def param_sets(self) -> list[dict[str, int]]:
        return expand_params(dict(self.params))

    def corrupted(self, side: str = "rhs", index: int = 0) -> "IdentityRecord":
        """Copy with the sign of one coefficient flipped."""
        terms = list(getattr(self, side))
        terms[index] = terms[index].negated()
        return replace(self, **{side: tuple(terms)})


@dataclass(frozen=True)
class CheckReport:
    id: str
    params: tuple[tuple[str, int], ...]
    status: Status
    lhs: str
    rhs: str
    residual: str
    tolerance: str
    terms: int
    digits: int
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status is Status.PASS

    def param_text(self) -> str:
        return ",".join(f"{k}={v}" for k, v in self.params) or "-"

    def line(self) -> str:
        fields = [
            self.id,
            self.param_text(),
            self.status.value,
            f"lhs={self.lhs}",
            f"rhs={self.rhs}",
            f"residual={self.residual}",
            f"tol={self.tolerance}",
            f"terms={self.terms}",
            f"digits={self.digits}",
        ]
        if self.detail:
            fields.append(f"detail={self.detail}")
        return " ".join(fields)

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "params": dict(self.params),
            "status": self.status.value,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "terms": self.terms,
            "digits": self.digits,
            "detail": self.detail,
        }


# ---------------------------------------------------------------------------
# record file


def parse_identities(text: str) -> tuple[IdentityRecord, ...]:
    records: list[IdentityRecord] = []
    current: dict | None = None
    section = None
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            head, _, rest = line.partition(" ")
            if current is None:
                if head == "suite-version":
                    if int(rest) != SUITE_VERSION:
                        raise SuiteError(f"unsupported suite version {rest}")
                    continue
                if head != "identity":
                    raise SuiteError(f"expected 'identity', got {head!r}")
                rid, kind = rest.split()
                if rid in seen:
                    raise SuiteError(f"duplicate identity id {rid!r}")
                seen.add(rid)
                current = {"id": rid, "kind": Kind(kind), "lhs": [], "rhs": []}
                section = None
                continue
            if head == "end":
                records.append(_finish(current))
                current = None
            elif head in ("lhs", "rhs") and not rest:
                section = head
            elif line.startswith("["):
                if section is None:
                    raise SuiteError("term line outside lhs/rhs")
                current[section].append(Term.parse(line))
            elif head == "title":
                current["title"] = rest
            elif head == "params":
                current["params"] = tuple(parse_ranges(rest).items())
            elif head == "digits":
                current["digits"] = int(rest)
            elif head in ("expr", "value"):
                current[head] = rest.strip()
            elif head == "star":
                code, sign = rest.split()
                current["star"], current["star_sign"] = code, int(sign)
            else:
                raise SuiteError(f"unknown field {head!r}")
        except (SuiteError, TemplateError, ValueError) as exc:
            raise SuiteError(f"line {lineno}: {exc}") from None
    if current is not None:
        raise SuiteError(f"unterminated identity {current['id']!r}")
    return tuple(records)


def _finish(d: dict) -> IdentityRecord:
    d = dict(d)
    d["lhs"], d["rhs"] = tuple(d["lhs"]), tuple(d["rhs"])
    rec = IdentityRecord(**d)
    if rec.kind is Kind.GOLDEN:
        if not rec.expr or not rec.value:
            raise SuiteError(f"golden record {rec.id} needs expr and value")
    elif not rec.lhs or not rec.rhs:
        raise SuiteError(f"record {rec.id} needs lhs and rhs")
    return rec


@lru_cache(maxsize=1)
def default_identities() -> tuple[IdentityRecord, ...]:
    text = resources.files("eulersums").joinpath("data/identities.txt").read_text(encoding="utf-8")
    return parse_identities(text)


def select(selector: str, records: Sequence[IdentityRecord] | None = None) -> tuple[IdentityRecord, ...]:
    """``all``, a kind name, an exact id, or an id prefix ending in ``.``/``*``."""
    records = default_identities() if records is None else tuple(records)
    if selector == "all":
        return records
    if selector in {k.value for k in Kind}:
        return tuple(r for r in records if r.kind.value == selector)
    exact = tuple(r for r in records if r.id == selector)
    if exact:
        return exact
    prefix = selector.rstrip("*")
    if selector.endswith(("*", ".")) and prefix:
        hits = tuple(r for r in records if r.id.startswith(prefix))
        if hits:
            return hits
    raise SuiteError(f"unknown selector {selector!r}")


# ---------------------------------------------------------------------------
# checks


def _exact_side(terms: Iterable[Term], env: dict[str, int]) -> Fraction:
    total = Fraction(0)
    for t in terms:
        if t.monomial != "1":
            raise SuiteError(f"exact records take the monomial 1, got {t.monomial!r}")
        if t.loop is None:
            total += eval_expr(t.coeff, env)
        else:
            var, lo, hi = t.loop
            for k in range(int(eval_expr(lo, env)), int(eval_expr(hi, env)) + 1):
                total += eval_expr(t.coeff, {**env, var: k})
    return total


def _frac_text(x: Fraction) -> str:
    return str(x) if len(str(x)) <= 60 else format_value(mpf(x.numerator) / x.denominator, 25)


def check_exact(rec: IdentityRecord, n_max: int = EXACT_N_MAX) -> list[CheckReport]:
    """Both sides in rational arithmetic for n = 1..n_max; one report per parameter set."""
    out = []
    for env in rec.param_sets():
        status, lhs, rhs, first_bad = Status.PASS, Fraction(0), Fraction(0), None
        for n in range(1, n_max + 1):
            local = {**env, "n": n}
            lhs, rhs = _exact_side(rec.lhs, local), _exact_side(rec.rhs, local)
            if lhs != rhs:
                status, first_bad = Status.FAIL, n
                break
        params = tuple(env.items()) + (("n", first_bad or n_max),)
        out.append(
            CheckReport(
                rec.id,
                params,
                status,
                _frac_text(lhs),
                _frac_text(rhs),
                _frac_text(abs(lhs - rhs)),
                "0",
                n_max if first_bad is None else first_bad,
                0,
                "" if first_bad is None else f"first mismatch at n={first_bad}",
            )
        )
    return out


def tolerance(digits: int) -> mpf:
    return mpf(10) ** (-(digits - 8))


def _sides(rec: IdentityRecord, env: dict[str, int], ctx: PrecisionContext, mode: str, max_terms: int):
    lhs = eval_combo(instantiate(rec.lhs, env), ctx, mode, max_terms)
    rhs = eval_combo(instantiate(rec.rhs, env), ctx, mode, max_terms)
    return lhs, rhs


def check_numeric(
    rec: IdentityRecord,
    env: dict[str, int],
    ctx: PrecisionContext,
    mode: str = "accel",
    max_terms: int = DEFAULT_MAX_TERMS,
) -> CheckReport:
    tol = tolerance(ctx.digits)
    shown = ctx.digits + 2
    params = tuple(env.items())
    try:
        lhs, rhs = _sides(rec, env, ctx, mode, max_terms)
    except (ToleranceUnreachable, EulerSumError) as exc:
        return CheckReport(rec.id, params, Status.UNREACHABLE, "-", "-", "-", _sci(tol), 0, ctx.digits, str(exc))
    with ctx.workdps():
        residual = abs(lhs.value - rhs.value)
    converged = lhs.error_bound < tol and rhs.error_bound < tol
    if residual < tol:
        status = Status.PASS
    elif converged:
        status = Status.DISCREPANCY
    else:
        status = Status.UNREACHABLE
    return CheckReport(
        rec.id,
        params,
        status,
        format_value(lhs.value, shown),
        format_value(rhs.value, shown),
        _sci(residual),
        _sci(tol),
        max(lhs.terms_used, rhs.terms_used),
        ctx.digits,
    )


def _sci(x) -> str:
    return mpmath.nstr(mpf(x), 3, min_fixed=1, max_fixed=0)


def matched_digits(value: mpf, printed: str) -> float:
    """Number of significant digits of ``printed`` reproduced by ``value``."""
    with mpmath.workdps(len(printed) + 10):
        ref = mpf(printed)
        diff = abs(mpf(value) - ref)
        if diff == 0:
            return float(len(printed.replace(".", "").lstrip("0-")))
        return float(-mpmath.log10(diff / abs(ref)))


def check_golden(
    rec: IdentityRecord,
    mode: str = "accel",
    ctx: PrecisionContext | None = None,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> CheckReport:
    if ctx is None:
        ctx = PrecisionContext(GOLDEN_DIGITS if mode == "accel" else DIRECT_GOLDEN_DIGITS)
    required = GOLDEN_REQUIRED[mode]
    if mode == "direct":
        max_terms = max(max_terms, DIRECT_GOLDEN_MAX_TERMS)
    e = parse(rec.expr)
    try:
        r = evaluate(e, ctx, mode, max_terms)
    except ToleranceUnreachable as exc:
        return CheckReport(rec.id, (), Status.UNREACHABLE, "-", rec.value, "-", f"{required}sd", 0, ctx.digits, str(exc))
    got = matched_digits(r.value, rec.value)
    status = Status.PASS if got >= required else Status.FAIL
    with mpmath.workdps(40):
        residual = abs(r.value - mpf(rec.value))
    return CheckReport(
        rec.id,
        (),
        status,
        format_value(r.value, ctx.digits),
        rec.value,
        _sci(residual),
        f"{required}sd",
        r.terms_used,
        ctx.digits,
        f"matched={got:.1f}sd strategy={r.strategy.value}",
    )


# ---------------------------------------------------------------------------
# runner


@dataclass
class SuiteReport:
    reports: list[CheckReport] = field(default_factory=list)
    discrepancies: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.status is Status.PASS for r in self.reports)

    def counts(self) -> dict[str, int]:
        out = {s.value: 0 for s in Status}
        for r in self.reports:
            out[r.status.value] += 1
        return out

    def text(self) -> str:
        lines = [r.line() for r in self.reports]
        c = self.counts()
        lines.append("summary " + " ".join(f"{k}={v}" for k, v in c.items()) + f" total={len(self.reports)}")
        return "\n".join(lines)

    def as_json(self) -> str:
        doc = {
            "suite_version": SUITE_VERSION,
            "summary": self.counts(),
            "reports": [r.as_dict() for r in self.reports],
            "discrepancies": self.discrepancies,
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def _discrepancy_entry(rec: IdentityRecord, env: dict[str, int], digits: int, mode: str, max_terms: int) -> dict:
    entry: dict = {"id": rec.id, "params": dict(env), "title": rec.title, "precisions": []}
    for d in (digits, min(digits + 10, 60)):
        ctx = PrecisionContext(d)
        try:
            lhs, rhs = _sides(rec, env, ctx, mode, max_terms)
        except EulerSumError as exc:
            entry["precisions"].append({"digits": d, "error": str(exc)})
            continue
        with ctx.workdps():
            diff = lhs.value - rhs.value
        entry["precisions"].append(
            {
                "digits": d,
                "lhs": format_value(lhs.value, d + 2),
                "rhs": format_value(rhs.value, d + 2),
                "lhs_minus_rhs": format_value(diff, 12),
                "lhs_error_bound": _sci(lhs.error_bound),
                "rhs_error_bound": _sci(rhs.error_bound),
            }
        )
    return entry


def run_suite(
    records: Sequence[IdentityRecord],
    digits: int | None = None,
    mode: str = "accel",
    max_terms: int = DEFAULT_MAX_TERMS,
    n_max: int = EXACT_N_MAX,
) -> SuiteReport:
    """Check ``records`` in order.  ``digits`` overrides per-record precision."""
    out = SuiteReport()
    for rec in records:
        if rec.kind is Kind.EXACT:
            out.reports.extend(check_exact(rec, n_max))
        elif rec.kind is Kind.GOLDEN:
            ctx = PrecisionContext(digits) if digits is not None else None
            out.reports.append(check_golden(rec, mode, ctx, max_terms))
        else:
            d = digits or rec.digits or DEFAULT_DIGITS
            ctx = PrecisionContext(d)
            for env in rec.param_sets():
                rep = check_numeric(rec, env, ctx, mode, max_terms)
                out.reports.append(rep)
                if rep.status is Status.DISCREPANCY:
                    out.discrepancies.append(_discrepancy_entry(rec, env, d, mode, max_terms))
    return out


def write_discrepancies(report: SuiteReport, path: str | Path) -> Path:
    path = Path(path)
    lines = []
    for entry in report.discrepancies:
        params = ",".join(f"{k}={v}" for k, v in entry["params"].items()) or "-"
        lines.append(f"[{entry['id']} {params}] {entry['title']}")
        for p in entry["precisions"]:
            if "error" in p:
                lines.append(f"  digits={p['digits']} error={p['error']}")
                continue
            lines.append(f"  digits={p['digits']} lhs={p['lhs']} (+-{p['lhs_error_bound']})")
            lines.append(f"  digits={p['digits']} rhs={p['rhs']} (+-{p['rhs_error_bound']})")
            lines.append(f"  digits={p['digits']} lhs-rhs={p['lhs_minus_rhs']}")
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return path


def run_full_suite(
    digits: int | None = None,
    mode: str = "accel",
    report_path: str | Path | None = None,
) -> SuiteReport:
    """Every record in the bundled identity file."""
    report = run_suite(default_identities(), digits, mode)
    if report_path is not None:
        write_discrepancies(report, report_path)
    return report

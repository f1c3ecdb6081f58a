"""Acceptance criteria 1-7.  Each test records one PASS/FAIL line, printed in
the pytest terminal summary (and directly when run as a script)."""
import time

import mpmath
import pytest

from conftest import ACCEPTANCE
from eulersums import numerics, reduction, series
from eulersums.numerics import PrecisionContext
from eulersums.parser import parse
from eulersums.reduction import eval_combo
from eulersums.series import evaluate
from eulersums.suite import (
    DIRECT_GOLDEN_DIGITS,
    DIRECT_GOLDEN_MAX_TERMS,
    GOLDEN_DIGITS,
    GOLDEN_REQUIRED,
    Kind,
    Status,
    default_identities,
    matched_digits,
    run_suite,
    select,
)
from eulersums.templates import instantiate

GOLDEN = select("golden")
EXAMPLE_1 = ["closed.w4.hl", "closed.w4.l2", "closed.w4.hl-alt", "closed.w4.h2-alt", "closed.w4.l2-alt", "closed.w4.h2-odd"]
EXAMPLE_2 = ["closed.w6.h2-alt", "closed.w6.l2", "closed.w6.l2-alt", "closed.w6.hl", "closed.w6.hl-alt", "closed.w6.lz2"]
EXACT_IDS = [
    "conv-alt-l-prefix",
    "conv-l-sign-swap",
    "conv-h-square",
    "prefix-h-over-k",
    "prefix-mixed-hl",
    "parity-diff-even",
    "parity-diff-odd",
    "parity-sum-even",
    "parity-sum-odd",
]
FAMILY_IDS = [
    "alt-h2-hl-mixed",
    "alt-h2-minus-hl",
    "h2-minus-z2",
    "conv-h-alt",
    "star-s-b1-1",
    "star-bs-b1-1",
    "conv-l-alt",
    "star-bp-1-b1",
    "star-p-1-b1",
    "alt-h2-even",
    "alt-hl-even",
    "alt-l2-mixed",
    "star-bs-1-b1",
    "l2-hl-nonalt",
    "zeta-sq-parity",
    "zeta-sq-odd-parity",
    "hl-even-parity",
    "h2-odd-even-parity",
]

_direct_cache: dict[str, tuple] = {}


def _record(n: int, ok: bool, text: str) -> None:
    ACCEPTANCE[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {text}"
    print(ACCEPTANCE[n])


def _clear_caches() -> None:
    series._accel_cached.cache_clear()
    series._star_accel.cache_clear()
    reduction.eval_atom.cache_clear()
    numerics._cache.clear()


def _golden_direct(rec):
    if rec.id not in _direct_cache:
        t = time.perf_counter()
        r = evaluate(parse(rec.expr), PrecisionContext(DIRECT_GOLDEN_DIGITS), "direct", DIRECT_GOLDEN_MAX_TERMS)
        _direct_cache[rec.id] = (r, time.perf_counter() - t)
    return _direct_cache[rec.id]


def _side_values(rec, digits):
    ctx = PrecisionContext(digits)
    lhs = eval_combo(instantiate(rec.lhs, {}), ctx)
    rhs = eval_combo(instantiate(rec.rhs, {}), ctx)
    with ctx.workdps():
        return lhs, rhs, abs(lhs.value - rhs.value)


def test_criterion_1_golden_table():
    worst = {"direct": (99.0, 0.0), "accel": (99.0, 0.0)}
    failures = []
    for rec in GOLDEN:
        r, secs = _golden_direct(rec)
        got = matched_digits(r.value, rec.value)
        worst["direct"] = (min(worst["direct"][0], got), max(worst["direct"][1], secs))
        if got < GOLDEN_REQUIRED["direct"] or secs > 60:
            failures.append(f"{rec.id} direct {got:.1f}sd {secs:.1f}s")
        _clear_caches()
        t = time.perf_counter()
        r = evaluate(parse(rec.expr), PrecisionContext(GOLDEN_DIGITS), "accel")
        secs = time.perf_counter() - t
        got = matched_digits(r.value, rec.value)
        worst["accel"] = (min(worst["accel"][0], got), max(worst["accel"][1], secs))
        if got < GOLDEN_REQUIRED["accel"] or secs > 10:
            failures.append(f"{rec.id} accel {got:.1f}sd {secs:.1f}s")
    d, a = worst["direct"], worst["accel"]
    _record(
        1,
        not failures,
        f"golden table 11/11: direct >= {d[0]:.1f}sd (max {d[1]:.1f}s), accel >= {a[0]:.1f}sd (max {a[1]:.2f}s)"
        + (f"; failed: {failures}" if failures else ""),
    )
    assert not failures


def test_criterion_2_weight4_closed_forms():
    tol = mpmath.mpf(10) ** -18
    bad = []
    worst_ok = mpmath.mpf(0)
    for rid in EXAMPLE_1:
        (rec,) = select(rid)
        lhs, rhs, diff = _side_values(rec, 30)
        if diff < tol:
            worst_ok = max(worst_ok, diff)
        else:
            bad.append(f"{rid} residual {mpmath.nstr(diff, 3)}")
    _record(
        2,
        not bad,
        f"weight-4 closed forms at 30 digits, tol 1e-18: {len(EXAMPLE_1) - len(bad)}/{len(EXAMPLE_1)} within tolerance"
        f" (max passing residual {mpmath.nstr(worst_ok, 3)})" + (f"; outside: {bad}" if bad else ""),
    )
    assert not bad


def test_criterion_3_weight6_closed_forms():
    tol = mpmath.mpf(10) ** -10
    bad = []
    worst = mpmath.mpf(0)
    for rid in EXAMPLE_2:
        (rec,) = select(rid)
        lhs, rhs, diff = _side_values(rec, 20)
        worst = max(worst, diff)
        if not diff < tol:
            bad.append(f"{rid} residual {mpmath.nstr(diff, 3)}")
    _record(
        3,
        not bad,
        f"weight-6 closed forms at 20 digits, tol 1e-10: {len(EXAMPLE_2) - len(bad)}/{len(EXAMPLE_2)}"
        f" (max residual {mpmath.nstr(worst, 3)})" + (f"; outside: {bad}" if bad else ""),
    )
    assert not bad


def test_criterion_4_exact_suite():
    records = [select(i)[0] for i in EXACT_IDS]
    assert all(r.kind is Kind.EXACT for r in records)
    report = run_suite(records, n_max=200)
    bad = [r.line() for r in report.reports if r.status is not Status.PASS]
    _record(4, not bad, f"exact identities, n <= 200: {len(report.reports) - len(bad)}/{len(report.reports)} PASS")
    assert not bad


def test_criterion_5_parameterized_families():
    records = [select(i)[0] for i in FAMILY_IDS]
    report = run_suite(records)
    counts = report.counts()
    entries = {(e["id"], tuple(e["params"].items())): e for e in report.discrepancies}
    silent = []
    for r in report.reports:
        if r.status in (Status.FAIL, Status.UNREACHABLE):
            silent.append(r.line())
        elif r.status is Status.DISCREPANCY:
            e = entries.get((r.id, r.params))
            ok = e is not None and len(e["precisions"]) == 2 and all("lhs" in p and "rhs" in p for p in e["precisions"])
            if not ok:
                silent.append(f"{r.id} {r.param_text()} without two-precision values")
    disc = sorted({r.id for r in report.reports if r.status is Status.DISCREPANCY})
    _record(
        5,
        not silent,
        f"families: PASS={counts['PASS']} DISCREPANCY={counts['DISCREPANCY']} ({', '.join(disc) or 'none'})"
        f" FAIL={counts['FAIL']} UNREACHABLE={counts['UNREACHABLE']}",
    )
    assert not silent


def test_criterion_6_property_suites():
    import random

    import test_properties as props
    from eulersums.model import make_sum
    from eulersums.parser import render

    # deterministic sweep complementing the hypothesis round trip

    rng = random.Random(20261016)
    kinds = [("H", 1)] + [(k, a) for k in "LZh" for a in range(1, 7)]
    checked = 0
    while checked < 10_000:
        n = rng.randint(0, 3)
        factors = [(*rng.choice(kinds), rng.randint(1, 3)) for _ in range(n)]
        try:
            e = make_sum(factors, alternating=rng.random() < 0.5, power=rng.randint(1, 8), odd=rng.random() < 0.3)
        except ValueError:
            continue
        assert parse(render(e)) == e
        checked += 1

    props.test_canonicalization_idempotent_and_order_free()
    props.test_constants_refine_monotonically()
    props.test_euler_gamma_refines()
    props.test_seeded_corruption_detected()
    _record(
        6,
        True,
        f"properties: parser round trip on {checked} seeded expressions (hypothesis run of"
        f" {props.ROUND_TRIP_EXAMPLES} in test_properties.py), canonicalization idempotent,"
        " constants refine monotonically 20..40 digits, seeded coefficient flips detected",
    )


def test_criterion_7_cross_strategy():
    bad = []
    worst = 0.0
    for rec in GOLDEN:
        d, _ = _golden_direct(rec)
        a = evaluate(parse(rec.expr), PrecisionContext(GOLDEN_DIGITS), "accel")
        with mpmath.workdps(50):
            gap = abs(d.value - a.value)
            bound = d.error_bound + a.error_bound
            worst = max(worst, float(gap / bound))
            if gap > bound:
                bad.append(f"{rec.id} gap {mpmath.nstr(gap, 3)} > {mpmath.nstr(bound, 3)}")
    _record(7, not bad, f"direct vs accel on 11 golden sums: max gap/bound = {worst:.3f}" + (f"; {bad}" if bad else ""))
    assert not bad


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))

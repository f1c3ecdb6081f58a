"""Numerical evaluation of Euler sums and star values.

Two independent routes:

* :func:`eval_direct` streams the harmonic accumulators in fixed-point
  integer arithmetic and stops at a certified truncation point.
* :func:`eval_accelerated` sums a short head exactly and replaces the tail by
  the large-n expansion of the summand (Euler-Maclaurin for the smooth part,
  Boole summation for the part carrying ``(-1)^n``).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mpf

from . import numerics
from .errors import ExpansionExhausted, ToleranceUnreachable, UnsupportedError
from .model import StarIndex, SumExpr, star_to_sum
from .numerics import PrecisionContext
from .sequences import Seq, choose_cut, infinite_sum, star_seq, sum_seq

DEFAULT_MAX_TERMS = 2_000_000
NESTED_CAP = 100_000
MONOTONE_RUN = 32


class Strategy(str, enum.Enum):
    DIRECT = "Direct"
    EULER_MACLAURIN = "EulerMaclaurin"
    ALTERNATING_ACCEL = "AlternatingAccel"
    NESTED_ORACLE = "NestedOracle"
    CONSTANT = "Constant"
    COMBINATION = "Combination"


@dataclass(frozen=True)
class EvalResult:
    value: mpf
    error_bound: mpf
    terms_used: int
    strategy: Strategy

    def scaled(self, c: int | Fraction) -> "EvalResult":
        # keep the precision the value was computed at, whatever mp.prec is now
        c = Fraction(c)
        bits = max(mpmath.mp.prec, self.value._mpf_[3] + 64)
        value = mpmath.fdiv(mpmath.fmul(c.numerator, self.value, exact=True), c.denominator, prec=bits)
        return replace(self, value=value, error_bound=abs(mpf(c.numerator)) / c.denominator * self.error_bound)

    def __float__(self) -> float:
        return float(self.value)


# ---------------------------------------------------------------------------
# harmonic accumulators


@dataclass(frozen=True)
class HarmonicState:
    """Prefix sums at index ``n``; exact (Fraction) or mpf depending on ``exact``."""

    n: int = 0
    h: object = 0
    zeta_k: dict = field(default_factory=dict)
    l_k: dict = field(default_factory=dict)
    oddh_p: dict = field(default_factory=dict)
    exact: bool = True

    @classmethod
    def start(cls, zeta_k=(), l_k=(), oddh_p=(), exact: bool = True) -> "HarmonicState":
        zero = Fraction(0) if exact else mpf(0)
        return cls(0, zero, {k: zero for k in zeta_k}, {k: zero for k in l_k}, {p: zero for p in oddh_p}, exact)

    @classmethod
    def for_expr(cls, e: SumExpr, exact: bool = True) -> "HarmonicState":
        return cls.start(
            [f.arg for f in e.factors if f.kind == "Z"],
            [f.arg for f in e.factors if f.kind == "L"],
            [f.arg for f in e.factors if f.kind == "h"],
            exact,
        )

    def factor_value(self, kind: str, arg: int = 1):
        if kind == "H":
            return self.h
        return {"Z": self.zeta_k, "L": self.l_k, "h": self.oddh_p}[kind][arg]


def advance(state: HarmonicState) -> HarmonicState:
    n = state.n + 1
    one = Fraction(1) if state.exact else mpf(1)
    sign = 1 if n % 2 else -1
    return HarmonicState(
        n,
        state.h + one / n,
        {k: v + one / n**k for k, v in state.zeta_k.items()},
        {k: v + sign * one / n**k for k, v in state.l_k.items()},
        {p: v + one / (2 * n - 1) ** p for p, v in state.oddh_p.items()},
        state.exact,
    )


# ---------------------------------------------------------------------------
# direct summation


def _tail_integral(q: int, d: int, log_shift: float, cut: int) -> mpf:
    """int_cut^inf (ln x + log_shift)^d x^{-q} dx."""
    lg = mpmath.log(cut) + log_shift
    total = mpf(0)
    for k in range(d + 1):
        total += math.factorial(d) // math.factorial(d - k) * lg ** (d - k) / mpf(q - 1) ** (k + 1)
    return total * mpf(cut) ** (1 - q)


def _nonalt_bound(e: SumExpr, ctx: PrecisionContext):
    """Tail bound as a function of the cut for a non-alternating sum."""
    const = mpf(1)
    d = 0
    for f in e.factors:
        if f.kind == "H" or (f.kind == "h" and f.arg == 1):
            d += f.exponent
            continue
        if f.kind == "Z":
            b = numerics.zeta(f.arg, ctx).value
        elif f.kind == "L":
            b = numerics.zeta_bar(f.arg, ctx).value + 1
        else:
            b = numerics.zeta(f.arg, ctx).value
        const *= b**f.exponent
    if e.denom.odd:
        const /= mpf(2) ** e.denom.power

    def bound(cut: int) -> mpf:
        return const * _tail_integral(e.denom.power, d, 1.1, cut)

    return bound


class _Kernel:
    """Fixed-point streaming of one Euler sum's terms."""

    def __init__(self, e: SumExpr, scale: int):
        self.e = e
        self.scale = scale
        self.n = 0
        self.acc = [[f.kind, f.arg, f.exponent, 0] for f in e.factors]

    def next_term(self) -> int:
        self.n = n = self.n + 1
        s = self.scale
        prod = s
        for slot in self.acc:
            kind, arg, exp, val = slot
            if kind == "H":
                val += s // n
            elif kind == "Z":
                val += s // n**arg
            elif kind == "L":
                val += s // n**arg if n % 2 else -(s // n**arg)
            else:
                val += s // (2 * n - 1) ** arg
            slot[3] = val
            for _ in range(exp):
                prod = prod * val // s
        q = self.e.denom.power
        return prod // ((2 * n + 1) ** q if self.e.denom.odd else n**q)


def eval_direct(e: SumExpr, ctx: PrecisionContext, max_terms: int = DEFAULT_MAX_TERMS) -> EvalResult:
    """Plain truncated summation with a truncation bound at ctx.digits."""
    with ctx.workdps():
        tol = mpf(10) ** (-ctx.digits)
        scale = 10**ctx.work
        ulp = mpf(10) ** (-ctx.work)
        ops = e.degree + 3
        kernel = _Kernel(e, scale)
        if not e.alternating:
            bound = _nonalt_bound(e, ctx)
            lo, hi = 100, max_terms
            if bound(hi) + hi * ops * ulp > tol:
                raise ToleranceUnreachable(
                    f"direct sum needs more than {max_terms} terms", achieved=bound(hi), terms=max_terms
                )
            while lo < hi:
                mid = (lo + hi) // 2
                if bound(mid) + mid * ops * ulp <= tol / 2:
                    hi = mid
                else:
                    lo = mid + 1
            total = 0
            for _ in range(lo):
                total += kernel.next_term()
            err = bound(lo) + lo * ops * ulp
            return EvalResult(mpf(total) / scale, err, lo, Strategy.DIRECT)

        limit = int(tol * scale)
        total = 0
        run = 0
        prev = None
        sign = 1
        while kernel.n < max_terms:
            a = kernel.next_term()
            if prev is not None:
                run = run + 1 if abs(a) < abs(prev) else 0
            if run >= MONOTONE_RUN and abs(a) + kernel.n * ops <= limit // 2:
                err = mpf(abs(a)) / scale + kernel.n * ops * ulp
                return EvalResult(mpf(total) / scale, err, kernel.n - 1, Strategy.DIRECT)
            total += sign * a
            sign = -sign
            prev = a
        raise ToleranceUnreachable(
            f"alternating sum not within tolerance after {max_terms} terms",
            achieved=mpf(abs(prev or 0)) / scale,
            value=mpf(total) / scale,
            terms=max_terms,
        )


# ---------------------------------------------------------------------------
# accelerated summation


def eval_seq(node: Seq, ctx: PrecisionContext, weight: int, strategy: Strategy | None = None) -> EvalResult:
    """Accelerated sum_{n>=1} node(n); retries once with a doubled cut."""
    cut = choose_cut(node, weight)
    with ctx.workdps():
        tol = mpf(10) ** (-ctx.digits)
    for attempt in range(2):
        value, err, osc = infinite_sum(node, ctx, cut)
        if err <= tol:
            tag = strategy or (Strategy.ALTERNATING_ACCEL if osc else Strategy.EULER_MACLAURIN)
            return EvalResult(value, err, cut, tag)
        cut *= 2
    raise ExpansionExhausted(f"tail expansion error {mpmath.nstr(err, 3)} above tolerance")


@lru_cache(maxsize=4096)
def _accel_cached(e: SumExpr, ctx: PrecisionContext) -> EvalResult:
    tag = Strategy.ALTERNATING_ACCEL if e.alternating else Strategy.EULER_MACLAURIN
    return eval_seq(sum_seq(e), ctx, e.weight, tag)


def eval_accelerated(e: SumExpr, ctx: PrecisionContext, max_terms: int = DEFAULT_MAX_TERMS) -> EvalResult:
    try:
        return _accel_cached(e, ctx)
    except ExpansionExhausted:
        return eval_direct(e, ctx, max_terms)


def evaluate(e: SumExpr, ctx: PrecisionContext, mode: str = "accel", max_terms: int = DEFAULT_MAX_TERMS) -> EvalResult:
    if mode == "direct":
        return eval_direct(e, ctx, max_terms)
    return eval_accelerated(e, ctx, max_terms)


# ---------------------------------------------------------------------------
# star values


def _nested_direct(s: StarIndex, ctx: PrecisionContext, cap: int = NESTED_CAP) -> EvalResult:
    """Streaming nested summation of a depth-3 star value."""
    with ctx.workdps():
        scale = 10**ctx.work
        tol = mpf(10) ** (-ctx.digits)
        (s1, b1), (s2, b2), (s3, b3) = s.slots
        inner = middle = total = 0
        prev = None
        run = 0
        log_run = 0
        for value, barred in s.slots[1:]:
            if value == 1 and not barred:
                log_run += 1
            else:
                break
        n = 0
        bound = None
        while n < cap:
            n += 1
            t3 = scale // n**s3
            inner += -t3 if (b3 and n % 2) else t3
            t2 = inner // n**s2
            middle += -t2 if (b2 and n % 2) else t2
            a = middle // n**s1
            if b1:
                if prev is not None:
                    run = run + 1 if abs(a) < abs(prev) else 0
                if run >= MONOTONE_RUN and abs(a) <= int(tol * scale) // 2:
                    return EvalResult(mpf(total) / scale, mpf(abs(a)) / scale, n - 1, Strategy.NESTED_ORACLE)
                total += -a if n % 2 else a
                prev = a
            else:
                total += a
        if b1:
            bound = mpf(abs(prev)) / scale
        else:
            g = abs(mpf(middle) / scale)
            shift = mpf(1.1)
            lg = mpmath.log(n) + shift
            bound = g / lg**log_run * _tail_integral(s1, log_run, 1.1, n) if log_run else g * _tail_integral(s1, 0, 0, n)
        value = mpf(total) / scale
        if bound > tol:
            raise ToleranceUnreachable(
                f"nested sum bound {mpmath.nstr(bound, 3)} after {n} terms", achieved=bound, value=value, terms=n
            )
        return EvalResult(value, bound, n, Strategy.NESTED_ORACLE)


@lru_cache(maxsize=4096)
def _star_accel(s: StarIndex, ctx: PrecisionContext) -> EvalResult:
    return eval_seq(star_seq(s), ctx, s.weight, Strategy.NESTED_ORACLE)


def eval_star(s: StarIndex, ctx: PrecisionContext, mode: str = "accel", max_terms: int = DEFAULT_MAX_TERMS) -> EvalResult:
    if s.depth == 1:
        value, barred = s.slots[0]
        with ctx.workdps():
            if barred:
                cv = numerics.zeta_bar(value, ctx)
                return EvalResult(-cv.value, cv.error_bound, 0, Strategy.CONSTANT)
            cv = numerics.zeta(value, ctx)
            return EvalResult(cv.value, cv.error_bound, 0, Strategy.CONSTANT)
    if s.depth == 2:
        e, sign = star_to_sum(s)
        return evaluate(e, ctx, mode, max_terms).scaled(sign)
    if s.depth == 3:
        if mode == "direct":
            return _nested_direct(s, ctx, min(max_terms, NESTED_CAP))
        return _star_accel(s, ctx)
    raise UnsupportedError(f"depth {s.depth}")

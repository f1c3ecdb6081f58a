"""Working-precision context and the constant atoms.

Values are mpmath ``mpf`` numbers carried at ``digits + guard`` decimal
digits; ``error_bound`` is the accuracy claimed for that value.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mpf

from .errors import DivergentError


@dataclass(frozen=True)
class PrecisionContext:
    digits: int = 30
    guard: int = 10

    def __post_init__(self) -> None:
        if not 10 <= self.digits <= 60:
            raise ValueError(f"digits must be in 10..60, got {self.digits}")
        if self.guard < 5:
            raise ValueError("guard must be >= 5")

    @property
    def work(self) -> int:
        return self.digits + self.guard

    @property
    def tol(self) -> mpf:
        with mpmath.workdps(self.work):
            return mpf(10) ** (-self.digits)

    def workdps(self):
        return mpmath.workdps(self.work)

    def refined(self, extra: int) -> "PrecisionContext":
        return PrecisionContext(self.digits + extra, self.guard)


@dataclass(frozen=True)
class ConstantValue:
    value: mpf
    error_bound: mpf

    def __float__(self) -> float:
        return float(self.value)


_cache: dict[tuple, ConstantValue] = {}
_cache_lock = threading.Lock()


def _cached(key: tuple, ctx: PrecisionContext, compute) -> ConstantValue:
    key = key + (ctx.digits, ctx.guard)
    hit = _cache.get(key)
    if hit is not None:
        return hit
    with ctx.workdps():
        cv = compute()
    with _cache_lock:
        return _cache.setdefault(key, cv)


def _claimed(ctx: PrecisionContext) -> mpf:
    with ctx.workdps():
        return mpf(10) ** (-(ctx.work - 2))


# ---------------------------------------------------------------------------
# exact rationals


@lru_cache(maxsize=None)
def _bernoulli_upto(n: int) -> tuple[Fraction, ...]:
    b = [Fraction(1)]
    for m in range(1, n + 1):
        acc = Fraction(0)
        c = 1  # C(m+1, j)
        for j in range(m):
            acc += c * b[j]
            c = c * (m + 1 - j) // (j + 1)
        b.append(-acc / (m + 1))
    return tuple(b)


def bernoulli(k: int) -> Fraction:
    """Bernoulli number B_k for even k >= 2 (B_1 = -1/2 convention not exposed)."""
    if k < 2 or k % 2:
        raise ValueError(f"bernoulli needs an even index >= 2, got {k}")
    size = 16
    while size < k:
        size *= 2
    return _bernoulli_upto(size)[k]


def _bernoulli_any(k: int) -> Fraction:
    if k == 0:
        return Fraction(1)
    if k == 1:
        return Fraction(-1, 2)
    if k % 2:
        return Fraction(0)
    return bernoulli(k)


@lru_cache(maxsize=None)
def boole_coefficient(m: int) -> Fraction:
    """Taylor coefficient of 1/(1+e^t): E_m(0) / (2 m!)."""
    if m == 0:
        return Fraction(1, 2)
    euler0 = Fraction(-2 * (2 ** (m + 1) - 1)) * _bernoulli_any(m + 1) / (m + 1)
    return euler0 / (2 * math.factorial(m))


def zeta_even_ratio(s: int) -> Fraction:
    """zeta(s) / pi^s for even s, an exact rational."""
    if s < 2 or s % 2:
        raise ValueError("zeta_even_ratio needs even s >= 2")
    k = s // 2
    return (-1) ** (k + 1) * bernoulli(s) * Fraction(2 ** (s - 1), math.factorial(s))


# ---------------------------------------------------------------------------
# constants


def _eta_cvz(s: int, dps: int) -> mpf:
    """Alternating series sum (-1)^k/(k+1)^s via Cohen-Rodriguez Villegas-Zagier."""
    n = int(math.ceil(1.31 * dps)) + 2
    d = (3 + mpmath.sqrt(8)) ** n
    d = (d + 1 / d) / 2
    b = mpf(-1)
    c = -d
    total = mpf(0)
    for k in range(n):
        c = b - c
        total += c / mpf(k + 1) ** s
        b = b * (k + n) * (k - n) / ((k + mpf(1) / 2) * (k + 1))
    return total / d


def eta(s: int, ctx: PrecisionContext) -> ConstantValue:
    return _cached(("eta", s), ctx, lambda: ConstantValue(_eta_cvz(s, ctx.work), _claimed(ctx)))


def zeta(s: int, ctx: PrecisionContext) -> ConstantValue:
    if s < 2:
        raise DivergentError(f"zeta({s}) diverges")

    def compute() -> ConstantValue:
        e = _eta_cvz(s, ctx.work)
        return ConstantValue(e / (1 - mpf(2) ** (1 - s)), _claimed(ctx))

    return _cached(("zeta", s), ctx, compute)


def zeta_bar(s: int, ctx: PrecisionContext) -> ConstantValue:
    if s < 1:
        raise DivergentError(f"zeta_bar({s}) diverges")
    if s == 1:
        return ln2(ctx)

    def compute() -> ConstantValue:
        z = zeta(s, ctx).value
        return ConstantValue((1 - mpf(2) ** (1 - s)) * z, _claimed(ctx))

    return _cached(("zeta_bar", s), ctx, compute)


def li_half(p: int, ctx: PrecisionContext) -> ConstantValue:
    """Li_p(1/2) = sum 1/(n^p 2^n); geometric convergence."""
    if p < 1:
        raise ValueError("li_half needs p >= 1")

    def compute() -> ConstantValue:
        terms = int(math.ceil(ctx.work * math.log2(10))) + ctx.guard
        total = mpf(0)
        w = mpf(1)
        for n in range(1, terms + 1):
            w /= 2
            total += w / mpf(n) ** p
        return ConstantValue(total, _claimed(ctx))

    return _cached(("li_half", p), ctx, compute)


def ln2(ctx: PrecisionContext) -> ConstantValue:
    return li_half(1, ctx)


def euler_gamma(ctx: PrecisionContext, n: int | None = None) -> ConstantValue:
    """Euler's constant from H_N - ln N with the Euler-Maclaurin correction.

    ``n`` overrides the cut point (used to cross-check two independent cuts).
    """

    def compute() -> ConstantValue:
        target = mpf(10) ** (-(ctx.work + 2))
        cut = n if n is not None else max(10, ctx.work)
        while True:
            h = mpmath.fsum(mpf(1) / k for k in range(1, cut + 1))
            g = h - mpmath.log(cut) - mpf(1) / (2 * cut)
            last = None
            for j in range(1, 200):
                b = bernoulli(2 * j)
                term = mpf(b.numerator) / b.denominator / (2 * j * mpf(cut) ** (2 * j))
                if last is not None and abs(term) > abs(last):
                    break
                g += term
                last = term
                if abs(term) < target:
                    return ConstantValue(g, _claimed(ctx))
            cut *= 2

    return _cached(("gamma", n), ctx, compute)


def constant_value(kind: str, arg, ctx: PrecisionContext) -> ConstantValue:
    """Dispatch for the atom codes used in combos (``z``, ``zb``, ``ln2``, ``li``)."""
    if kind == "z":
        return zeta(int(arg), ctx)
    if kind == "zb":
        return zeta_bar(int(arg), ctx)
    if kind == "ln2":
        return ln2(ctx)
    if kind == "li":
        return li_half(int(arg), ctx)
    raise KeyError(kind)

"""Log-power asymptotic series in the summation index.

A :class:`LogSeries` is a truncated expansion

    sum_j  n^{-j} * P_j(ln n)

where each ``P_j`` is a polynomial in ``ln n`` stored as a coefficient list.
An :class:`OscSeries` pairs a smooth part with a part multiplied by
``(-1)^n``.  Prefix sums of such expansions are again expansions of the
same shape (Euler-Maclaurin for the smooth part, Boole summation for the
oscillating part), which is all the tail machinery needs.

All arithmetic happens at the caller's mpmath precision.
"""
from __future__ import annotations

from fractions import Fraction

import mpmath
from mpmath import mpf

from .errors import DivergentError
from .numerics import boole_coefficient, bernoulli

Poly = list  # coefficients of ln(n)^i, index i


def _frac(x: Fraction) -> mpf:
    return mpf(x.numerator) / x.denominator


def _padd(p: Poly, q: Poly, scale=1) -> Poly:
    out = list(p) + [mpf(0)] * max(0, len(q) - len(p))
    for i, c in enumerate(q):
        out[i] += scale * c
    return out


def _pmul(p: Poly, q: Poly) -> Poly:
    out = [mpf(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for k, b in enumerate(q):
            out[i + k] += a * b
    return out


def _pderiv(p: Poly) -> Poly:
    return [i * p[i] for i in range(1, len(p))] or [mpf(0)]


def _trim(p: Poly) -> Poly:
    p = list(p)
    while len(p) > 1 and not p[-1]:
        p.pop()
    return p


def _is_zero(p: Poly) -> bool:
    return all(not c for c in p)


class LogSeries:
    __slots__ = ("terms", "order")

    def __init__(self, terms: dict[int, Poly] | None = None, order: int = 20):
        self.order = order
        self.terms = {j: _trim(p) for j, p in (terms or {}).items() if j <= order and not _is_zero(p)}

    @classmethod
    def constant(cls, c, order: int) -> "LogSeries":
        return cls({0: [mpf(c)]}, order)

    def copy(self) -> "LogSeries":
        return LogSeries(dict(self.terms), self.order)

    def truncate(self, order: int) -> "LogSeries":
        return LogSeries({j: p for j, p in self.terms.items() if j <= order}, order)

    def __add__(self, other: "LogSeries") -> "LogSeries":
        order = min(self.order, other.order)
        out = {j: list(p) for j, p in self.terms.items()}
        for j, p in other.terms.items():
            out[j] = _padd(out.get(j, [mpf(0)]), p)
        return LogSeries(out, order)

    def scale(self, c) -> "LogSeries":
        c = _frac(c) if isinstance(c, Fraction) else c
        return LogSeries({j: [c * a for a in p] for j, p in self.terms.items()}, self.order)

    def __neg__(self) -> "LogSeries":
        return self.scale(mpf(-1))

    def __mul__(self, other: "LogSeries") -> "LogSeries":
        order = min(self.order, other.order)
        out: dict[int, Poly] = {}
        for j1, p1 in self.terms.items():
            for j2, p2 in other.terms.items():
                j = j1 + j2
                if j > order:
                    continue
                out[j] = _padd(out.get(j, [mpf(0)]), _pmul(p1, p2))
        return LogSeries(out, order)

    def min_power(self) -> int | None:
        return min(self.terms) if self.terms else None

    def __call__(self, n) -> mpf:
        x = mpf(n)
        lg = mpmath.log(x)
        total = mpf(0)
        for j, p in self.terms.items():
            total += x ** (-j) * mpmath.polyval(p[::-1], lg)
        return total

    def __repr__(self) -> str:
        return f"LogSeries({ {j: [mpmath.nstr(c, 8) for c in p] for j, p in sorted(self.terms.items())} }, order={self.order})"


class OscSeries:
    """``smooth(n) + (-1)^n * alt(n)``."""

    __slots__ = ("smooth", "alt")

    def __init__(self, smooth: LogSeries, alt: LogSeries):
        self.smooth = smooth
        self.alt = alt

    @classmethod
    def zero(cls, order: int) -> "OscSeries":
        return cls(LogSeries({}, order), LogSeries({}, order))

    @classmethod
    def constant(cls, c, order: int) -> "OscSeries":
        return cls(LogSeries.constant(c, order), LogSeries({}, order))

    @classmethod
    def sign(cls, order: int) -> "OscSeries":
        return cls(LogSeries({}, order), LogSeries.constant(1, order))

    @property
    def order(self) -> int:
        return min(self.smooth.order, self.alt.order)

    def __add__(self, other: "OscSeries") -> "OscSeries":
        return OscSeries(self.smooth + other.smooth, self.alt + other.alt)

    def scale(self, c) -> "OscSeries":
        return OscSeries(self.smooth.scale(c), self.alt.scale(c))

    def __neg__(self) -> "OscSeries":
        return self.scale(mpf(-1))

    def __mul__(self, other: "OscSeries") -> "OscSeries":
        # (-1)^n (-1)^n = 1
        smooth = self.smooth * other.smooth + self.alt * other.alt
        alt = self.smooth * other.alt + self.alt * other.smooth
        return OscSeries(smooth, alt)

    def truncate(self, order: int) -> "OscSeries":
        return OscSeries(self.smooth.truncate(order), self.alt.truncate(order))

    @property
    def oscillates(self) -> bool:
        return bool(self.alt.terms)

    def __call__(self, n: int) -> mpf:
        value = self.smooth(n)
        if self.alt.terms:
            value += (-1) ** n * self.alt(n)
        return value


def _derivative(j: int, p: Poly) -> tuple[int, Poly]:
    # d/dx [x^{-j} P(ln x)] = x^{-j-1} (P'(ln x) - j P(ln x))
    return j + 1, _padd(_pderiv(p), p, scale=-j)


def _antiderivative(j: int, p: Poly) -> tuple[int, Poly]:
    if j == 1:
        return 0, [mpf(0)] + [c / (i + 1) for i, c in enumerate(p)]
    # x^{1-j} Q with (1-j) Q + Q' = P  =>  Q = sum_k (-1)^k P^{(k)} / (1-j)^{k+1}
    a = mpf(1 - j)
    q: Poly = [mpf(0)] * len(p)
    deriv = list(p)
    k = 0
    while deriv and not _is_zero(deriv):
        coeff = (-1) ** k / a ** (k + 1)
        q = _padd(q, deriv, scale=coeff)
        deriv = _pderiv(deriv) if len(deriv) > 1 else []
        k += 1
    return j - 1, q


def antidifference(s: OscSeries) -> OscSeries:
    """Expansion G with G(n) - G(n-1) = s(n), up to an additive constant."""
    order = s.order
    smooth: dict[int, Poly] = {}
    alt: dict[int, Poly] = {}

    def put(target: dict[int, Poly], j: int, p: Poly, c) -> None:
        if j <= order:
            target[j] = _padd(target.get(j, [mpf(0)]), p, scale=c)

    for j, p in s.smooth.terms.items():
        fj, fp = _antiderivative(j, p)
        put(smooth, fj, fp, 1)
        put(smooth, j, p, mpf(1) / 2)
        dj, dp = _derivative(j, p)  # first derivative
        m = 1
        while dj <= order:
            b = bernoulli(2 * m)
            coeff = _frac(b / _fact(2 * m))
            put(smooth, dj, dp, coeff)
            dj, dp = _derivative(*_derivative(dj, dp))
            m += 1
    for j, p in s.alt.terms.items():
        put(alt, j, p, mpf(1) / 2)
        dj, dp = _derivative(j, p)
        m = 1
        while dj <= order:
            c = boole_coefficient(m)
            if c:
                put(alt, dj, dp, -_frac(c))
            dj, dp = _derivative(dj, dp)
            m += 1
    return OscSeries(LogSeries(smooth, order), LogSeries(alt, order))


_FACT = [1]


def _fact(n: int) -> int:
    while len(_FACT) <= n:
        _FACT.append(_FACT[-1] * len(_FACT))
    return _FACT[n]


def tail_sum(s: OscSeries, cut: int) -> mpf:
    """sum_{n > cut} s(n) for a convergent expansion."""
    eps = mpf(10) ** (-(mpmath.mp.dps - 8))
    s = OscSeries(s.smooth.copy(), s.alt.copy())
    for part, need in ((s.smooth, 2), (s.alt, 1)):
        for j, p in list(part.terms.items()):
            if j < need:
                if max(abs(c) for c in p) > eps:
                    raise DivergentError(f"expansion term n^-{j} does not give a convergent tail")
                del part.terms[j]
    return -antidifference(s)(cut)

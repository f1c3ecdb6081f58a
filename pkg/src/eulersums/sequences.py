"""Composable sequences a(n), n >= 1, each with exact-prefix values and a
large-n expansion.

Every Euler sum, star value or auxiliary nested sum the library evaluates is
written as ``InfSum(node)``: the head ``a(1) + ... + a(N0)`` is summed term by
term and the tail comes from the node's :class:`~eulersums.asymptotic.OscSeries`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf

from . import numerics
from .asymptotic import LogSeries, OscSeries, antidifference, tail_sum
from .model import HarmonicFactor, StarIndex, SumExpr


class Memo(dict):
    """Per-evaluation cache; valid for one (cut, order, precision)."""

    def __init__(self, ctx: numerics.PrecisionContext, cut: int, order: int):
        super().__init__()
        self.ctx = ctx
        self.cut = cut
        self.order = order


class Seq:
    def values(self, memo: Memo) -> list[mpf]:
        key = (self, "v")
        if key not in memo:
            memo[key] = self._values(memo)
        return memo[key]

    def expansion(self, memo: Memo) -> OscSeries:
        key = (self, "x")
        if key not in memo:
            memo[key] = self._expansion(memo)
        return memo[key]

    def min_cut(self) -> int:
        return max((c.min_cut() for c in self.children()), default=0)

    def children(self) -> tuple["Seq", ...]:
        return ()

    def _values(self, memo: Memo) -> list[mpf]:
        raise NotImplementedError

    def _expansion(self, memo: Memo) -> OscSeries:
        raise NotImplementedError

    def __mul__(self, other: "Seq") -> "Seq":
        return Prod((self, other))

    def __add__(self, other: "Seq") -> "Seq":
        return Lin(((Fraction(1), self), (Fraction(1), other)))

    def __sub__(self, other: "Seq") -> "Seq":
        return Lin(((Fraction(1), self), (Fraction(-1), other)))

    def __neg__(self) -> "Seq":
        return Lin(((Fraction(-1), self),))

    def scaled(self, c) -> "Seq":
        return Lin(((Fraction(c), self),))


@dataclass(frozen=True, eq=True)
class Const(Seq):
    c: Fraction

    def _values(self, memo):
        v = mpf(self.c.numerator) / self.c.denominator
        return [v] * (memo.cut + 1)

    def _expansion(self, memo):
        return OscSeries.constant(mpf(self.c.numerator) / self.c.denominator, memo.order)


@dataclass(frozen=True, eq=True)
class Pow(Seq):
    """(a n + b)^(-s), zero for n < start."""

    s: int
    a: int = 1
    b: int = 0
    start: int = 1

    def min_cut(self) -> int:
        return 16 * max(abs(self.b) // max(self.a, 1), self.start)

    def _values(self, memo):
        out = [mpf(0)] * (memo.cut + 1)
        for n in range(max(1, self.start), memo.cut + 1):
            out[n] = 1 / mpf(self.a * n + self.b) ** self.s
        return out

    def _expansion(self, memo):
        # (a n)^{-s} (1 + b/(a n))^{-s} = a^{-s} sum_r binom(-s, r) (b/a)^r n^{-s-r}
        terms = {}
        ratio = Fraction(self.b, self.a)
        coeff = Fraction(1, self.a**self.s)
        r = 0
        while self.s + r <= memo.order:
            if coeff:
                terms[self.s + r] = [mpf(coeff.numerator) / coeff.denominator]
            coeff = coeff * (-self.s - r) / (r + 1) * ratio
            r += 1
        return OscSeries(LogSeries(terms, memo.order), LogSeries({}, memo.order))


@dataclass(frozen=True, eq=True)
class Sign(Seq):
    """(-1)^n."""

    def _values(self, memo):
        return [mpf((-1) ** n) for n in range(memo.cut + 1)]

    def _expansion(self, memo):
        return OscSeries.sign(memo.order)


@dataclass(frozen=True, eq=True)
class Prod(Seq):
    items: tuple[Seq, ...]

    def children(self):
        return self.items

    def _values(self, memo):
        vals = [it.values(memo) for it in self.items]
        out = list(vals[0])
        for v in vals[1:]:
            out = [x * y for x, y in zip(out, v)]
        return out

    def _expansion(self, memo):
        out = self.items[0].expansion(memo)
        for it in self.items[1:]:
            out = out * it.expansion(memo)
        return out


@dataclass(frozen=True, eq=True)
class Lin(Seq):
    items: tuple[tuple[Fraction, Seq], ...]

    def children(self):
        return tuple(s for _, s in self.items)

    def _values(self, memo):
        out = [mpf(0)] * (memo.cut + 1)
        for c, s in self.items:
            cv = mpf(c.numerator) / c.denominator
            out = [o + cv * v for o, v in zip(out, s.values(memo))]
        return out

    def _expansion(self, memo):
        out = OscSeries.zero(memo.order)
        for c, s in self.items:
            out = out + s.expansion(memo).scale(c)
        return out


@dataclass(frozen=True, eq=True)
class Prefix(Seq):
    """G(n) = sum_{k<=n} child(k).

    ``limit`` names the constant term of G's expansion when it is known in
    closed form; otherwise it is fitted from the exact value G(cut).
    """

    child: Seq
    limit: tuple | None = None

    def children(self):
        return (self.child,)

    def _values(self, memo):
        vals = self.child.values(memo)
        out = [mpf(0)] * (memo.cut + 1)
        acc = mpf(0)
        for n in range(1, memo.cut + 1):
            acc += vals[n]
            out[n] = acc
        return out

    def _expansion(self, memo):
        g = antidifference(self.child.expansion(memo))
        if self.limit is not None:
            c = known_limit(self.limit, memo.ctx)
        else:
            c = self.values(memo)[memo.cut] - g(memo.cut)
        return g + OscSeries.constant(c, memo.order)


def known_limit(key: tuple, ctx: numerics.PrecisionContext) -> mpf:
    kind = key[0]
    if kind == "gamma":
        return numerics.euler_gamma(ctx).value
    if kind == "zeta":
        return numerics.zeta(key[1], ctx).value
    if kind == "zeta_bar":
        return numerics.zeta_bar(key[1], ctx).value
    if kind == "neg_zeta_bar":
        return -numerics.zeta_bar(key[1], ctx).value
    if kind == "oddh":
        p = key[1]
        if p == 1:
            return numerics.ln2(ctx).value + numerics.euler_gamma(ctx).value / 2
        return (1 - mpf(2) ** (-p)) * numerics.zeta(p, ctx).value
    raise KeyError(key)


SIGN = Sign()


def factor_seq(f: HarmonicFactor, with_limits: bool = True) -> Seq:
    """The prefix sum for one harmonic factor (exponent ignored)."""
    if f.kind == "H":
        return Prefix(Pow(1), ("gamma",) if with_limits else None)
    if f.kind == "Z":
        return Prefix(Pow(f.arg), ("zeta", f.arg) if with_limits else None)
    if f.kind == "L":
        # (-1)^{k-1} / k^p
        return Prefix(Lin(((Fraction(-1), Prod((SIGN, Pow(f.arg)))),)), ("zeta_bar", f.arg) if with_limits else None)
    if f.kind == "h":
        return Prefix(Pow(f.arg, 2, -1), ("oddh", f.arg) if with_limits else None)
    raise ValueError(f.kind)


def sum_seq(e: SumExpr, with_limits: bool = True) -> Seq:
    items: list[Seq] = []
    for f in e.factors:
        base = factor_seq(f, with_limits)
        items.extend([base] * f.exponent)
    if e.denom.odd:
        items.append(Pow(e.denom.power, 2, 1))
    else:
        items.append(Pow(e.denom.power))
    if e.alternating:
        items.append(Lin(((Fraction(-1), SIGN),)))
    return Prod(tuple(items)) if len(items) > 1 else items[0]


def star_seq(s: StarIndex) -> Seq:
    """Summand of zeta*(s_1, ..., s_k) as a sequence in the outermost index."""
    slots = list(s.slots)
    inner: Seq | None = None
    for idx in range(len(slots) - 1, -1, -1):
        value, barred = slots[idx]
        term: Seq = Pow(value)
        if barred:
            term = Prod((SIGN, term))
        if inner is not None:
            term = Prod((term, inner))
        if idx == 0:
            return term
        inner = Prefix(term, _star_limit(slots[idx:]))
    raise AssertionError("unreachable")


def _star_limit(tail: list[tuple[int, bool]]) -> tuple | None:
    # closed-form constants only for the innermost single-slot prefix
    if len(tail) != 1:
        return None
    value, barred = tail[0]
    if barred:
        return ("neg_zeta_bar", value)
    return ("gamma",) if value == 1 else ("zeta", value)


def choose_cut(node: Seq, weight: int) -> int:
    return max(64, 32 * weight, node.min_cut())


def choose_order(cut: int, ctx: numerics.PrecisionContext) -> int:
    return int(math.ceil(ctx.work / math.log10(cut))) + 4


def infinite_sum(node: Seq, ctx: numerics.PrecisionContext, cut: int, order: int | None = None):
    """(value, error estimate) of sum_{n>=1} node(n) at ctx working precision."""
    order = order or choose_order(cut, ctx)
    with ctx.workdps():
        memo = Memo(ctx, cut, order)
        head = mpmath.fsum(node.values(memo)[1:])
        expansion = node.expansion(memo)
        tail = tail_sum(expansion, cut)
        coarse = tail_sum(expansion.truncate(order - 3), cut)
        err = abs(tail - coarse) + mpf(10) ** (-(ctx.work - 3))
        return head + tail, err, expansion.oscillates

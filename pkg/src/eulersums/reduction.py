"""Rewriting Euler sums to closed forms over zeta values, ln 2, Li_p(1/2)
and irreducible star-linear symbols.

Rules live in a versioned, line-oriented catalog (``data/catalog.txt``)::

    catalog-version 1

    table <id> <sum>            fully resolved closed form, highest priority
      [p/q] monomial
    end

    rule <id> <pattern> [external]
      where <condition>         optional, integer arithmetic on pattern vars
      let <var> = <expr>        optional derived parameters
      [coeff] monomial [for j=lo..hi]
    end

Patterns are canonical renderings with ``{var}`` integer holes, e.g.
``sum(H^2, alt)/n^{q}``.  A rule is accepted only when every Euler sum it
emits reduces in turn; star-linear symbols without a closed form stay in the
result as basis atoms.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Iterable

import mpmath
from mpmath import mpf

from . import numerics
from .auxsums import aux_seq
from .errors import EulerSumError
from .model import (
    SUM,
    ZS,
    Atom,
    LinearCombo,
    StarIndex,
    SumExpr,
    monomial_weight,
    star_to_sum,
)
from .numerics import PrecisionContext
from .parser import parse, render
from .series import DEFAULT_MAX_TERMS, EvalResult, Strategy, eval_seq, eval_star, evaluate
from .templates import Term, evaluate as eval_expr, instantiate

CATALOG_VERSION = 1


class CatalogError(EulerSumError, ValueError):
    pass


@dataclass(frozen=True)
class ReductionRule:
    id: str
    pattern: str
    terms: tuple[Term, ...]
    table: bool = False
    external: bool = False
    where: tuple[str, ...] = ()
    lets: tuple[tuple[str, str], ...] = ()

    @property
    def regex(self) -> re.Pattern:
        return _pattern_regex(self.pattern)

    def match(self, text: str) -> dict[str, int] | None:
        if self.table:
            return {} if text == self.pattern else None
        m = self.regex.fullmatch(text)
        if not m:
            return None
        env: dict[str, int] = {k: int(v) for k, v in m.groupdict().items()}
        for name, expr in self.lets:
            value = eval_expr(expr, env)
            if value.denominator != 1:
                return None
            env[name] = int(value)
        for cond in self.where:
            if not eval_expr(cond, env):
                return None
        return env

    def emit(self, env: dict[str, int]) -> LinearCombo:
        return instantiate(self.terms, env)

    def trace_id(self) -> str:
        return f"{self.id}[external]" if self.external else self.id


@lru_cache(maxsize=None)
def _pattern_regex(pattern: str) -> re.Pattern:
    out = []
    seen: set[str] = set()
    pos = 0
    for m in re.finditer(r"\{(\w+)\}", pattern):
        out.append(re.escape(pattern[pos : m.start()]))
        name = m.group(1)
        out.append(f"(?P={name})" if name in seen else f"(?P<{name}>\\d+)")
        seen.add(name)
        pos = m.end()
    out.append(re.escape(pattern[pos:]))
    return re.compile("".join(out))


@dataclass(frozen=True)
class Catalog:
    version: int
    rules: tuple[ReductionRule, ...]

    def get(self, rule_id: str) -> ReductionRule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    def tables(self) -> tuple[ReductionRule, ...]:
        return tuple(r for r in self.rules if r.table)

    def generic(self) -> tuple[ReductionRule, ...]:
        return tuple(r for r in self.rules if not r.table)


def parse_catalog(text: str) -> Catalog:
    version = None
    rules: list[ReductionRule] = []
    current: dict | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("catalog-version"):
                version = int(line.split()[1])
            elif current is None:
                head, rest = line.split(None, 1)
                if head not in ("table", "rule"):
                    raise CatalogError(f"expected 'table' or 'rule', got {head!r}")
                parts = rest.split()
                external = parts[-1] == "external"
                if external:
                    parts = parts[:-1]
                rule_id, pattern = parts[0], " ".join(parts[1:])
                if head == "table":
                    pattern = render(parse(pattern))
                current = dict(id=rule_id, pattern=pattern, table=head == "table", external=external, terms=[], where=[], lets=[])
            elif line == "end":
                rules.append(
                    ReductionRule(
                        current["id"],
                        current["pattern"],
                        tuple(current["terms"]),
                        current["table"],
                        current["external"],
                        tuple(current["where"]),
                        tuple(current["lets"]),
                    )
                )
                current = None
            elif line.startswith("where "):
                current["where"].append(line[6:].strip())
            elif line.startswith("let "):
                name, _, expr = line[4:].partition("=")
                current["lets"].append((name.strip(), expr.strip()))
            else:
                current["terms"].append(Term.parse(line))
        except (ValueError, IndexError) as exc:
            raise CatalogError(f"catalog line {lineno}: {exc}") from None
    if current is not None:
        raise CatalogError(f"unterminated record {current['id']!r}")
    if version != CATALOG_VERSION:
        raise CatalogError(f"unsupported catalog version {version}")
    ids = [r.id for r in rules]
    if len(ids) != len(set(ids)):
        raise CatalogError("duplicate rule ids")
    return Catalog(version, tuple(rules))


@lru_cache(maxsize=1)
def default_catalog() -> Catalog:
    text = resources.files("eulersums").joinpath("data/catalog.txt").read_text(encoding="utf-8")
    return parse_catalog(text)


# ---------------------------------------------------------------------------
# reduction


@dataclass(frozen=True)
class Reduction:
    input: SumExpr | StarIndex
    result: LinearCombo
    trace: tuple[str, ...]
    residual: SumExpr | StarIndex | None = None

    @property
    def complete(self) -> bool:
        return self.residual is None


@dataclass
class _Reducer:
    catalog: Catalog
    allow_external: bool = True
    stack: list = field(default_factory=list)
    memo: dict = field(default_factory=dict)

    def rules(self) -> Iterable[ReductionRule]:
        for r in self.catalog.rules:
            if r.external and not self.allow_external:
                continue
            yield r

    def constant(self, e: SumExpr) -> LinearCombo | None:
        if e.factors:
            return None
        q = e.denom.power
        if not e.denom.odd:
            return LinearCombo.atom(Atom("zb" if e.alternating else "z", q))
        if e.alternating:
            return None
        # sum_{n>=1} (2n+1)^{-q} = (1 - 2^{-q}) zeta(q) - 1
        return LinearCombo.atom(Atom("z", q), 1 - Fraction(1, 2**q)) - LinearCombo.const(1)

    def reduce_sum(self, e: SumExpr, linear_fallback: bool = True) -> tuple[LinearCombo, tuple[str, ...]] | None:
        key = (e, linear_fallback)
        if key in self.memo:
            return self.memo[key]
        if e in self.stack:
            return None
        self.stack.append(e)
        try:
            out = self._reduce_sum(e, linear_fallback)
        finally:
            self.stack.pop()
        self.memo[key] = out
        return out

    def _reduce_sum(self, e: SumExpr, linear_fallback: bool):
        c = self.constant(e)
        if c is not None:
            return c, ("constant",)
        text = render(e)
        for rule in self.rules():
            env = rule.match(text)
            if env is None:
                continue
            resolved = self.resolve(rule.emit(env))
            if resolved is None:
                continue
            combo, sub = resolved
            return combo, (rule.trace_id(),) + sub
        if linear_fallback and e.degree == 1 and not e.denom.odd and e.factors[0].kind != "h":
            from .model import sum_to_star

            s, sign = sum_to_star(e)
            return LinearCombo.atom(ZS(s), sign), ("star-linear",)
        return None

    def lookup(self, s: StarIndex) -> tuple[LinearCombo, tuple[str, ...]] | None:
        if s.depth == 1:
            return LinearCombo.atom(ZS(s)), ()
        if s.depth != 2:
            return None
        e, sign = star_to_sum(s)
        out = self.reduce_sum(e, linear_fallback=False)
        if out is None:
            return None
        return out[0] * sign, out[1]

    def resolve(self, combo: LinearCombo) -> tuple[LinearCombo, tuple[str, ...]] | None:
        """Replace every sum atom by its reduction and every star-linear atom
        by its closed form when one exists; ``None`` if a sum is stuck."""
        subs: dict[Atom, LinearCombo] = {}
        trace: list[str] = []
        for atom in sorted(combo.atoms(), key=lambda a: a.sort_key):
            if atom.kind == "sum":
                got = self.reduce_sum(atom.arg)
                if got is None:
                    return None
                subs[atom] = got[0]
                trace.extend(got[1])
            elif atom.kind == "zs":
                got = self.lookup(atom.arg)
                if got is not None:
                    subs[atom] = got[0]
                    trace.extend(got[1])
        return substitute(combo, subs), tuple(trace)


def substitute(combo: LinearCombo, subs: dict[Atom, LinearCombo]) -> LinearCombo:
    if not subs:
        return combo
    out = LinearCombo()
    for mono, coeff in combo.terms:
        term = LinearCombo.const(coeff)
        for atom, exp in mono:
            piece = subs.get(atom, LinearCombo.atom(atom))
            term = term * (piece**exp)
        out = out + term
    return out


def reduce(e: SumExpr | StarIndex, allow_external_identities: bool = True, catalog: Catalog | None = None) -> Reduction:
    """Reduce ``e`` to a closed form.  Never raises for lack of a rule: an
    irreducible input comes back as ``residual`` with itself as the result."""
    r = _Reducer(catalog or default_catalog(), allow_external_identities)
    if isinstance(e, StarIndex):
        got = r.lookup(e)
        if got is None:
            return Reduction(e, LinearCombo.atom(ZS(e)), (), e)
        return Reduction(e, got[0], got[1])
    got = r.reduce_sum(e)
    if got is None:
        return Reduction(e, LinearCombo.atom(SUM(e)), (), e)
    return Reduction(e, got[0], got[1])


def lookup_linear(s: StarIndex, allow_external_identities: bool = True, catalog: Catalog | None = None) -> LinearCombo | None:
    """Closed form of a star value of depth <= 2 when the catalog has one."""
    got = _Reducer(catalog or default_catalog(), allow_external_identities).lookup(s)
    return None if got is None else got[0]


def combo_weights(c: LinearCombo) -> set[int]:
    return {monomial_weight(m) for m, _ in c.terms}


# ---------------------------------------------------------------------------
# numeric evaluation of combinations


@lru_cache(maxsize=8192)
def eval_atom(atom: Atom, ctx: PrecisionContext, mode: str = "accel", max_terms: int = DEFAULT_MAX_TERMS) -> EvalResult:
    if atom.kind in ("z", "zb", "ln2", "li"):
        cv = numerics.constant_value(atom.kind, atom.arg, ctx)
        return EvalResult(cv.value, cv.error_bound, 0, Strategy.CONSTANT)
    if atom.kind == "zs":
        return eval_star(atom.arg, ctx, mode, max_terms)
    if atom.kind == "sum":
        return evaluate(atom.arg, ctx, mode, max_terms)
    if atom.kind == "aux":
        node, weight = aux_seq(atom)
        return eval_seq(node, ctx, weight, Strategy.NESTED_ORACLE)
    raise KeyError(atom.kind)


def eval_combo(c: LinearCombo, ctx: PrecisionContext, mode: str = "accel", max_terms: int = DEFAULT_MAX_TERMS) -> EvalResult:
    """Value of ``c`` with a first-order propagated error bound."""
    with ctx.workdps():
        total = mpf(0)
        err = mpf(0)
        terms = 0
        strategies = set()
        for mono, coeff in c.terms:
            cval = mpf(coeff.numerator) / coeff.denominator
            value = mpf(1)
            upper = mpf(1)
            for atom, exp in mono:
                r = eval_atom(atom, ctx, mode, max_terms)
                strategies.add(r.strategy)
                terms = max(terms, r.terms_used)
                value *= r.value**exp
                upper *= (abs(r.value) + r.error_bound) ** exp
            total += cval * value
            err += abs(cval) * (upper - abs(value))
        err += mpf(10) ** (-(ctx.work - 2)) * (1 + abs(total))
        if strategies <= {Strategy.CONSTANT}:
            tag = Strategy.CONSTANT
        elif len(strategies - {Strategy.CONSTANT}) == 1:
            tag = next(iter(strategies - {Strategy.CONSTANT}))
        else:
            tag = Strategy.COMBINATION
        return EvalResult(+total, err, terms, tag)


def residual_check(red: Reduction, ctx: PrecisionContext, mode: str = "accel") -> tuple[EvalResult, EvalResult, mpf]:
    """(lhs, rhs, |lhs - rhs|) for a reduction."""
    if isinstance(red.input, StarIndex):
        lhs = eval_star(red.input, ctx, mode)
    else:
        lhs = evaluate(red.input, ctx, mode)
    rhs = eval_combo(red.result, ctx, mode)
    with ctx.workdps():
        return lhs, rhs, abs(lhs.value - rhs.value)


def format_value(x: mpf, digits: int) -> str:
    return mpmath.nstr(x, digits, strip_zeros=False, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)

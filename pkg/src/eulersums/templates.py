"""Parameterized term templates shared by the reduction catalog and the
identity suite.

A term line is ``[coeff] monomial [for var=lo..hi]``:

* ``coeff`` is an exact arithmetic expression over integer parameters
  (``+ - * / ^``, parentheses) plus the finite prefix helpers ``H(n)``,
  ``Zn(n,k)``, ``Ln(n,k)``, ``hn(n,p)`` and ``fsum(expr, k, lo, hi)``;
* ``monomial`` is a combo monomial (``z2*ln2^2``, ``zs(b{2*m},2)``,
  ``sum(H^2, alt)/n^{s}``, ``1``) in which ``{expr}`` is replaced by the
  integer value of ``expr``.

Everything evaluates in :class:`fractions.Fraction`; no floats are involved.
"""
from __future__ import annotations

import ast
import re
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .model import LinearCombo


class TemplateError(ValueError):
    pass


# ---------------------------------------------------------------------------
# exact finite prefix sums


_PREFIX: dict[tuple[str, int], list[Fraction]] = {}


def _prefix(kind: str, arg: int, n: int) -> Fraction:
    table = _PREFIX.setdefault((kind, arg), [Fraction(0)])
    while len(table) <= n:
        table.append(table[-1] + _term(kind, arg, len(table)))
    return table[max(n, 0)]


def _term(kind: str, arg: int, n: int) -> Fraction:
    if kind == "Z":
        return Fraction(1, n**arg)
    if kind == "L":
        return Fraction(1 if n % 2 else -1, n**arg)
    if kind == "h":
        return Fraction(1, (2 * n - 1) ** arg)
    raise KeyError(kind)


def H(n: int) -> Fraction:
    return _prefix("Z", 1, int(n))


def Zn(n: int, k: int) -> Fraction:
    return _prefix("Z", int(k), int(n))


def Ln(n: int, k: int) -> Fraction:
    return _prefix("L", int(k), int(n))


def hn(n: int, p: int) -> Fraction:
    return _prefix("h", int(p), int(n))


_FUNCS = {"H": H, "Zn": Zn, "Ln": Ln, "hn": hn}


# ---------------------------------------------------------------------------
# expression evaluation


def _to_int(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise TemplateError(f"{what} must be an integer, got {x}")
    return int(x)


class _Eval:
    def __init__(self, env: Mapping[str, int | Fraction]):
        self.env = {k: Fraction(v) for k, v in env.items()}

    def __call__(self, node: ast.AST) -> Fraction:
        if isinstance(node, ast.Expression):
            return self(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return Fraction(node.value)
        if isinstance(node, ast.Name):
            if node.id not in self.env:
                raise TemplateError(f"unbound parameter {node.id!r}")
            return self.env[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = self(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a, b = self(node.left), self(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                if not b:
                    raise TemplateError("division by zero")
                return a / b
            if isinstance(node.op, ast.Mod):
                return Fraction(_to_int(a, "modulus operand") % _to_int(b, "modulus"))
            if isinstance(node.op, ast.Pow):
                return a ** _to_int(b, "exponent")
        if isinstance(node, ast.Compare) and len(node.ops) == 1:
            a, b = self(node.left), self(node.comparators[0])
            op = node.ops[0]
            ok = {
                ast.Eq: a == b,
                ast.NotEq: a != b,
                ast.Lt: a < b,
                ast.LtE: a <= b,
                ast.Gt: a > b,
                ast.GtE: a >= b,
            }.get(type(op))
            if ok is None:
                raise TemplateError("unsupported comparison")
            return Fraction(int(ok))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            name = node.func.id
            if name == "fsum":
                return self._fsum(node)
            if name in _FUNCS:
                args = [_to_int(self(a), f"{name} argument") for a in node.args]
                return _FUNCS[name](*args)
        raise TemplateError(f"unsupported expression element {ast.dump(node)[:60]}")

    def _fsum(self, node: ast.Call) -> Fraction:
        if len(node.args) != 4 or not isinstance(node.args[1], ast.Name):
            raise TemplateError("fsum(expr, var, lo, hi)")
        body, var = node.args[0], node.args[1].id
        lo = _to_int(self(node.args[2]), "fsum bound")
        hi = _to_int(self(node.args[3]), "fsum bound")
        saved = self.env.get(var)
        total = Fraction(0)
        for k in range(lo, hi + 1):
            self.env[var] = Fraction(k)
            total += self(body)
        if saved is None:
            self.env.pop(var, None)
        else:
            self.env[var] = saved
        return total


@lru_cache(maxsize=4096)
def _compile(text: str) -> ast.Expression:
    try:
        return ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise TemplateError(f"bad expression {text!r}: {exc.msg}") from None


def evaluate(text: str, env: Mapping[str, int | Fraction]) -> Fraction:
    return _Eval(env)(_compile(text))


def evaluate_int(text: str, env: Mapping[str, int | Fraction]) -> int:
    return _to_int(evaluate(text, env), text)


_BRACE = re.compile(r"\{([^{}]+)\}")


def substitute(text: str, env: Mapping[str, int | Fraction]) -> str:
    return _BRACE.sub(lambda m: str(evaluate_int(m.group(1), env)), text)


# ---------------------------------------------------------------------------
# term templates


_TERM = re.compile(r"^\[(?P<coeff>[^\]]*)\]\s*(?P<mono>.*?)(?:\s+for\s+(?P<var>\w+)\s*=\s*(?P<lo>[^.]+?)\s*\.\.\s*(?P<hi>\S+))?\s*$")


@dataclass(frozen=True)
class Term:
    coeff: str
    monomial: str
    loop: tuple[str, str, str] | None = None

    @classmethod
    def parse(cls, line: str) -> "Term":
        m = _TERM.match(line.strip())
        if not m:
            raise TemplateError(f"bad term line {line!r}")
        loop = (m.group("var"), m.group("lo"), m.group("hi")) if m.group("var") else None
        return cls(m.group("coeff").strip(), m.group("mono").strip(), loop)

    def negated(self) -> "Term":
        return replace(self, coeff=f"-({self.coeff})")

    def instantiate(self, env: Mapping[str, int | Fraction]) -> LinearCombo:
        from .parser import parse_combo

        if self.loop is None:
            envs = [dict(env)]
        else:
            var, lo, hi = self.loop
            a, b = evaluate_int(lo, env), evaluate_int(hi, env)
            envs = [{**env, var: k} for k in range(a, b + 1)]
        out = LinearCombo()
        for local in envs:
            c = evaluate(self.coeff, local)
            if not c:
                continue
            out = out + parse_combo(substitute(self.monomial, local)) * c
        return out

    def __str__(self) -> str:
        tail = f" for {self.loop[0]}={self.loop[1]}..{self.loop[2]}" if self.loop else ""
        return f"[{self.coeff}] {self.monomial}{tail}"


def instantiate(terms: tuple[Term, ...], env: Mapping[str, int | Fraction]) -> LinearCombo:
    out = LinearCombo()
    for t in terms:
        out = out + t.instantiate(env)
    return out


def parse_ranges(text: str) -> dict[str, tuple[int, ...]]:
    """``"m=1..3; p=1,2"`` -> ``{"m": (1, 2, 3), "p": (1, 2)}``."""
    out: dict[str, tuple[int, ...]] = {}
    for part in filter(None, (p.strip() for p in text.split(";"))):
        name, _, spec = part.partition("=")
        name, spec = name.strip(), spec.strip()
        if ".." in spec:
            lo, hi = spec.split("..")
            out[name] = tuple(range(int(lo), int(hi) + 1))
        else:
            out[name] = tuple(int(v) for v in spec.split(","))
    return out


def expand_params(ranges: Mapping[str, tuple[int, ...]]) -> list[dict[str, int]]:
    combos: list[dict[str, int]] = [{}]
    for name, values in ranges.items():
        combos = [{**c, name: v} for c in combos for v in values]
    return combos

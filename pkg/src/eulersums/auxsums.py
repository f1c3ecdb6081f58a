"""Auxiliary infinite series that appear on one side of an identity but are
not Euler sums themselves (convolutions, shifted tails).

Each is exposed as an ``aux`` atom ``name[weight,args...]`` and evaluated
with the accelerated engine through a :class:`~eulersums.sequences.Seq`.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .model import AUX, Atom, HarmonicFactor
from .sequences import SIGN, Const, Lin, Pow, Prefix, Prod, Seq, factor_seq

_L1 = HarmonicFactor("L", 1)
_H = HarmonicFactor("H")


def _conv_l(s: int) -> Seq:
    """sum_n (-1)^{n-1} C_n / n^s with C_n = sum_{k<n} L_k(1)/(n-k).

    C_n is rebuilt as a prefix sum: C_n = sum_{k<=n} (1+(-1)^k) L_{k-1}(1)/k
    (compare power series of -ln(1+x)ln(1-x)/(1-x)), which gives it a
    large-n expansion.  The rewrite is checked exactly in the test suite.
    """
    l_prev = Lin(((Fraction(1), factor_seq(_L1)), (Fraction(1), Prod((SIGN, Pow(1))))))
    even = Lin(((Fraction(1), Const(Fraction(1))), (Fraction(1), SIGN)))
    conv = Prefix(Prod((even, l_prev, Pow(1))))
    return Prod((conv, Pow(s), Lin(((Fraction(-1), SIGN),))))


def _shift(kind: str, n: int) -> Seq:
    """sum_{m>n} X_m (-1)^{m-n} / (m-n) as a sequence in m."""
    base = factor_seq(_H if kind == "H" else _L1)
    sign = Lin(((Fraction((-1) ** n), SIGN),))
    return Prod((base, sign, Pow(1, 1, -n, start=n + 1)))


# name -> (arity, weight(args), builder(args), description)
REGISTRY: dict[str, tuple[int, Callable[..., int], Callable[..., Seq], str]] = {
    "convL": (1, lambda s: s + 2, _conv_l, "sum_n (-1)^(n-1)/n^s * sum_{k<n} L_k(1)/(n-k)"),
    "shiftL": (1, lambda n: 2, lambda n: _shift("L", n), "sum_{m>n} L_m(1) (-1)^(m-n)/(m-n)"),
    "shiftH": (1, lambda n: 2, lambda n: _shift("H", n), "sum_{m>n} H_m (-1)^(m-n)/(m-n)"),
}


def aux_atom(name: str, *args: int) -> Atom:
    arity, weight, _, _ = REGISTRY[name]
    if len(args) != arity:
        raise ValueError(f"{name} takes {arity} argument(s)")
    return AUX(name, weight(*args), *args)


def aux_seq(atom: Atom) -> tuple[Seq, int]:
    name, w, args = atom.arg  # type: ignore[misc]
    if name not in REGISTRY:
        raise KeyError(f"unknown auxiliary series {name!r}")
    return REGISTRY[name][2](*args), w

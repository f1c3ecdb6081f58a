"""Expression universe: Euler sums, star indices and constant combinations.

Every object here is an immutable value with a single canonical form, so it
can be hashed, cached and compared structurally.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import DivergentError, UnsupportedError

# kind rank used for canonical factor ordering: H < L < Zeta < OddH
KIND_RANK = {"H": 0, "L": 1, "Z": 2, "h": 3}


@dataclass(frozen=True, order=False)
class HarmonicFactor:
    """One harmonic-type prefix sum raised to a power.

    ``kind`` is ``"H"`` (H_n), ``"Z"`` (zeta_n(k)), ``"L"`` (L_n(k)) or
    ``"h"`` (odd harmonic h_n(p)); ``arg`` is k or p (always 1 for H).
    """

    kind: str
    arg: int = 1
    exponent: int = 1

    def __post_init__(self) -> None:
        if self.kind not in KIND_RANK:
            raise ValueError(f"unknown harmonic kind {self.kind!r}")
        if self.arg < 1 or self.exponent < 1:
            raise ValueError("factor argument and exponent must be >= 1")
        if self.kind == "H" and self.arg != 1:
            raise ValueError("H takes no argument")

    @property
    def sort_key(self) -> tuple[int, int]:
        return (KIND_RANK[self.kind], self.arg)

    @property
    def weight(self) -> int:
        return self.arg * self.exponent


@dataclass(frozen=True)
class Denominator:
    """``n^power`` (``odd=False``) or ``(2n+1)^power`` (``odd=True``)."""

    power: int
    odd: bool = False


@dataclass(frozen=True)
class SumExpr:
    factors: tuple[HarmonicFactor, ...]
    alternating: bool
    denom: Denominator

    @property
    def weight(self) -> int:
        return sum(f.weight for f in self.factors) + self.denom.power

    @property
    def degree(self) -> int:
        return sum(f.exponent for f in self.factors)

    def factor_exponent(self, kind: str, arg: int = 1) -> int:
        for f in self.factors:
            if f.kind == kind and f.arg == arg:
                return f.exponent
        return 0

    def __str__(self) -> str:
        from .parser import render

        return render(self)


def make_sum(
    factors: Iterable[tuple[str, int, int] | HarmonicFactor] = (),
    alternating: bool = False,
    power: int = 2,
    odd: bool = False,
) -> SumExpr:
    """Build and canonicalize a sum from ``(kind, arg, exponent)`` triples."""
    fs = []
    for f in factors:
        if isinstance(f, HarmonicFactor):
            fs.append(f)
        else:
            kind, arg, exp = f
            if kind == "Z" and arg == 1:
                kind = "H"
            fs.append(HarmonicFactor(kind, arg, exp))
    return canonicalize(SumExpr(tuple(fs), alternating, Denominator(power, odd)))


def canonicalize(raw: SumExpr) -> SumExpr:
    merged: dict[tuple[str, int], int] = {}
    for f in raw.factors:
        kind, arg = f.kind, f.arg
        if kind == "Z" and arg == 1:
            kind = "H"
        merged[(kind, arg)] = merged.get((kind, arg), 0) + f.exponent
    factors = tuple(
        HarmonicFactor(k, a, e)
        for (k, a), e in sorted(merged.items(), key=lambda kv: (KIND_RANK[kv[0][0]], kv[0][1]))
    )
    expr = SumExpr(factors, raw.alternating, raw.denom)
    check_convergent(expr)
    return expr


def check_convergent(e: SumExpr) -> None:
    # prefix factors grow at most like (ln n)^degree
    q = e.denom.power
    need = 1 if e.alternating else 2
    if q < need:
        shape = "alternating" if e.alternating else "non-alternating"
        raise DivergentError(f"{shape} sum with denominator power {q} diverges")


def weight(e: SumExpr) -> int:
    return e.weight


def degree(e: SumExpr) -> int:
    return e.degree


@dataclass(frozen=True)
class StarIndex:
    """Multiple zeta-star index; a barred slot carries the sign (-1)^{n_j}."""

    slots: tuple[tuple[int, bool], ...]

    def __post_init__(self) -> None:
        if not 1 <= len(self.slots) <= 3:
            raise UnsupportedError(f"star index depth {len(self.slots)} not in 1..3")
        for value, _ in self.slots:
            if value < 1:
                raise ValueError("star slot values must be >= 1")
        value, barred = self.slots[0]
        if value < 2 and not barred:
            raise DivergentError("leading star slot must be >= 2 or barred")

    @property
    def depth(self) -> int:
        return len(self.slots)

    @property
    def weight(self) -> int:
        return sum(v for v, _ in self.slots)

    def __str__(self) -> str:
        from .parser import render

        return render(self)


def star(*spec: int | str) -> StarIndex:
    """``star(5, 'b1')`` -> zeta*(5, 1-bar); strings prefixed ``b`` are barred."""
    slots = []
    for s in spec:
        if isinstance(s, str):
            barred = s.startswith("b")
            slots.append((int(s[1:] if barred else s), barred))
        else:
            slots.append((int(s), False))
    return StarIndex(tuple(slots))


def star_to_sum(s: StarIndex) -> tuple[SumExpr, int]:
    """Depth-2 star value as ``sign * sum``.

    zeta*(q,p) = S,  zeta*(q-bar,p) = -S_alt,  zeta*(q,p-bar) = -S_L,
    zeta*(q-bar,p-bar) = S_L,alt  where the inner factor is zeta_n(p) or L_n(p).
    """
    if s.depth != 2:
        raise UnsupportedError(f"star_to_sum needs depth 2, got {s.depth}")
    (q, qbar), (p, pbar) = s.slots
    kind = "L" if pbar else "Z"
    e = make_sum([(kind, p, 1)], alternating=qbar, power=q)
    sign = -1 if qbar != pbar else 1
    return e, sign


def sum_to_star(e: SumExpr) -> tuple[StarIndex, int] | None:
    """Inverse of :func:`star_to_sum` for pure linear sums over ``n^q``."""
    if e.degree != 1 or e.denom.odd:
        return None
    (f,) = e.factors
    if f.kind == "h":
        return None
    pbar = f.kind == "L"
    s = StarIndex(((e.denom.power, e.alternating), (f.arg, pbar)))
    return s, (-1 if e.alternating != pbar else 1)


# ---------------------------------------------------------------------------
# constant atoms and rational linear combinations


ATOM_RANK = {"z": 0, "zb": 1, "ln2": 2, "li": 3, "zs": 4, "sum": 5, "aux": 6}


@dataclass(frozen=True)
class Atom:
    """A constant symbol: ``z`` zeta(s), ``zb`` zeta-bar(s), ``ln2``,
    ``li`` Li_p(1/2), ``zs`` a star value, ``sum`` an unreduced Euler sum,
    ``aux`` a named auxiliary series used by the identity suite."""

    kind: str
    arg: object = None

    @property
    def weight(self) -> int:
        if self.kind == "ln2":
            return 1
        if self.kind in ("z", "zb", "li"):
            return int(self.arg)  # type: ignore[arg-type]
        if self.kind in ("zs", "sum"):
            return self.arg.weight  # type: ignore[union-attr]
        if self.kind == "aux":
            return int(self.arg[1])  # type: ignore[index]
        raise ValueError(self.kind)

    @property
    def sort_key(self) -> tuple:
        if self.kind in ("z", "zb", "li"):
            return (ATOM_RANK[self.kind], self.arg)
        if self.kind == "ln2":
            return (ATOM_RANK["ln2"],)
        if self.kind == "zs":
            slots = self.arg.slots  # type: ignore[union-attr]
            return (ATOM_RANK["zs"], len(slots), tuple((v, b) for v, b in slots))
        return (ATOM_RANK[self.kind], str(self.arg))

    def code(self) -> str:
        from .parser import render

        if self.kind == "z":
            return f"z{self.arg}"
        if self.kind == "zb":
            return f"zb{self.arg}"
        if self.kind == "ln2":
            return "ln2"
        if self.kind == "li":
            return f"li{self.arg}h"
        if self.kind in ("zs", "sum"):
            return render(self.arg)  # type: ignore[arg-type]
        name, w, args = self.arg  # type: ignore[misc]
        return f"{name}[{','.join(str(a) for a in (w, *args))}]"


def Z(s: int) -> Atom:
    return Atom("z", s)


def ZB(s: int) -> Atom:
    return Atom("zb", s)


LN2 = Atom("ln2")


def LI(p: int) -> Atom:
    return Atom("li", p)


def ZS(s: StarIndex) -> Atom:
    return Atom("zs", s)


def SUM(e: SumExpr) -> Atom:
    return Atom("sum", e)


def AUX(name: str, weight: int, *args: int) -> Atom:
    return Atom("aux", (name, weight, tuple(args)))


Monomial = tuple[tuple[Atom, int], ...]


def _monomial(pairs: Mapping[Atom, int]) -> Monomial:
    return tuple(sorted(((a, e) for a, e in pairs.items() if e), key=lambda ae: ae[0].sort_key))


def monomial_weight(m: Monomial) -> int:
    return sum(a.weight * e for a, e in m)


def _monomial_order(m: Monomial) -> tuple:
    # pure constants first (larger even-zeta part first), then Li, stars, sums
    klass = max((ATOM_RANK[a.kind] for a, _ in m), default=0)
    klass = 0 if klass <= ATOM_RANK["ln2"] else klass
    even = sum(a.arg * e for a, e in m if a.kind == "z" and a.arg % 2 == 0)
    odd = sum(a.arg * e for a, e in m if a.kind == "z" and a.arg % 2 == 1)
    return (klass, -even, odd, tuple((a.sort_key, e) for a, e in m))


@dataclass(frozen=True)
class LinearCombo:
    """Exact-rational combination of constant monomials.

    Construct through :meth:`from_terms` (or the arithmetic operators) so
    that terms are normalized; the raw constructor trusts its input.
    """

    terms: tuple[tuple[Monomial, Fraction], ...] = ()

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Mapping[Atom, int] | Monomial, Fraction | int]]) -> "LinearCombo":
        acc: dict[Monomial, Fraction] = {}
        for mono, coeff in terms:
            coeff = Fraction(coeff)
            if not coeff:
                continue
            pairs = dict(mono) if not isinstance(mono, dict) else mono
            for nm, c in _normalize_monomial(pairs).items():
                acc[nm] = acc.get(nm, Fraction(0)) + c * coeff
        return cls(tuple(sorted(((m, c) for m, c in acc.items() if c), key=lambda mc: _monomial_order(mc[0]))))

    @classmethod
    def atom(cls, a: Atom, coeff: Fraction | int = 1) -> "LinearCombo":
        return cls.from_terms([({a: 1}, coeff)])

    @classmethod
    def const(cls, c: Fraction | int) -> "LinearCombo":
        return cls.from_terms([({}, c)])

    def as_dict(self) -> dict[Monomial, Fraction]:
        return dict(self.terms)

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "LinearCombo") -> "LinearCombo":
        return LinearCombo.from_terms(list(self.terms) + list(_as_combo(other).terms))

    __radd__ = __add__

    def __neg__(self) -> "LinearCombo":
        return LinearCombo(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: "LinearCombo") -> "LinearCombo":
        return self + (-_as_combo(other))

    def __rsub__(self, other: "LinearCombo") -> "LinearCombo":
        return _as_combo(other) - self

    def __mul__(self, other: "LinearCombo | Fraction | int") -> "LinearCombo":
        if isinstance(other, (int, Fraction)):
            return LinearCombo.from_terms([(m, c * other) for m, c in self.terms])
        out = []
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                pairs = dict(m1)
                for a, e in m2:
                    pairs[a] = pairs.get(a, 0) + e
                out.append((pairs, c1 * c2))
        return LinearCombo.from_terms(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LinearCombo":
        out = LinearCombo.const(1)
        for _ in range(k):
            out = out * self
        return out

    def atoms(self) -> set[Atom]:
        return {a for m, _ in self.terms for a, _ in m}

    def weights(self) -> set[int]:
        return {monomial_weight(m) for m, _ in self.terms}

    def coefficient(self, mono: Mapping[Atom, int]) -> Fraction:
        return self.as_dict().get(_monomial(mono), Fraction(0))

    def __str__(self) -> str:
        from .parser import render_combo

        return render_combo(self)


def _as_combo(x: "LinearCombo | Fraction | int") -> LinearCombo:
    return x if isinstance(x, LinearCombo) else LinearCombo.const(x)


def _normalize_monomial(pairs: Mapping[Atom, int]) -> dict[Monomial, Fraction]:
    """Rewrite zeta-bar and Li_1 atoms, fold products of even zeta values."""
    from .numerics import zeta_even_ratio

    coeff = Fraction(1)
    out: dict[Atom, int] = {}
    expansions: list[dict[Monomial, Fraction]] = []
    for a, e in pairs.items():
        if e <= 0:
            continue
        if a.kind == "zb":
            s = int(a.arg)
            if s == 1:
                out[LN2] = out.get(LN2, 0) + e
            else:
                coeff *= (1 - Fraction(1, 2 ** (s - 1))) ** e
                out[Z(s)] = out.get(Z(s), 0) + e
        elif a.kind == "li" and a.arg == 1:
            out[LN2] = out.get(LN2, 0) + e
        elif a.kind == "zs" and a.arg.depth == 1:
            value, barred = a.arg.slots[0]
            # zeta*(s) = zeta(s); zeta*(s-bar) = -zeta-bar(s)
            base = ZB(value) if barred else Z(value)
            sub = _normalize_monomial({base: 1})
            if barred:
                sub = {m: -c for m, c in sub.items()}
            expansions.append(_power(sub, e))
        elif a.kind == "z" and a.arg < 2:
            raise DivergentError("zeta(1) is not a constant")
        else:
            out[a] = out.get(a, 0) + e
    even = sum(int(a.arg) * e for a, e in out.items() if a.kind == "z" and a.arg % 2 == 0)
    if even:
        for a in [a for a in out if a.kind == "z" and a.arg % 2 == 0]:
            coeff *= zeta_even_ratio(int(a.arg)) ** out.pop(a)
        coeff /= zeta_even_ratio(even)
        out[Z(even)] = 1
    result = {_monomial(out): coeff}
    for sub in expansions:
        nxt: dict[Monomial, Fraction] = {}
        for m1, c1 in result.items():
            for m2, c2 in sub.items():
                pairs2 = dict(m1)
                for a, e in m2:
                    pairs2[a] = pairs2.get(a, 0) + e
                for m3, c3 in _normalize_monomial(pairs2).items():
                    nxt[m3] = nxt.get(m3, Fraction(0)) + c1 * c2 * c3
        result = nxt
    return result


def _power(sub: dict[Monomial, Fraction], e: int) -> dict[Monomial, Fraction]:
    out: dict[Monomial, Fraction] = {(): Fraction(1)}
    for _ in range(e):
        nxt: dict[Monomial, Fraction] = {}
        for m1, c1 in out.items():
            for m2, c2 in sub.items():
                pairs = dict(m1)
                for a, k in m2:
                    pairs[a] = pairs.get(a, 0) + k
                key = _monomial(pairs)
                nxt[key] = nxt.get(key, Fraction(0)) + c1 * c2
        out = nxt
    return out

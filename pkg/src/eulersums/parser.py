"""Text grammar for Euler sums, star indices and constant combinations.

Grammar (whitespace insignificant)::

    query   = star | sum ;
    star    = "zs(" idx { "," idx } ")" ;
    idx     = [ "b" ] INT ;
    sum     = "sum(" numer [ "," "alt" ] ")/" denom ;
    numer   = "1" | term { "*" term } ;
    term    = atom [ "^" INT ] ;
    atom    = "H" | "L" INT | "Z" INT | "h" INT ;
    denom   = "n^" INT | "(2n+1)^" INT ;

Combinations print as ``41/16*z4 + 1/2*z2*ln2^2 - 2*li4h``: atom codes are
``zK`` (zeta), ``zbK`` (alternating zeta), ``ln2``, ``liKh`` (Li_K(1/2)),
star values ``zs(...)`` and unreduced sums ``sum(...)/...``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import EulerSumError
from .model import (
    AUX,
    LN2,
    Atom,
    Denominator,
    HarmonicFactor,
    LinearCombo,
    StarIndex,
    SumExpr,
    canonicalize,
    LI,
    SUM,
    Z,
    ZB,
    ZS,
)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int


class ParseError(EulerSumError, ValueError):
    def __init__(self, message: str, span: SourceSpan, text: str = ""):
        super().__init__(f"{message} at {span.start}..{span.end}")
        self.span = span
        self.text = text


class _Scanner:
    def __init__(self, text: str, pos: int = 0):
        self.text = text
        self.pos = pos

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, lit: str) -> bool:
        self.skip()
        return self.text.startswith(lit, self.pos)

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def fail(self, expected: str) -> ParseError:
        self.skip()
        start = min(self.pos, len(self.text))
        end = min(start + 1, len(self.text))
        found = self.text[start:end] or "end of input"
        return ParseError(f"expected {expected}, found {found!r}", SourceSpan(start, end), self.text)

    def expect(self, lit: str) -> None:
        # literals may contain spaces-free tokens only; match char by char over whitespace
        self.skip()
        for ch in lit:
            self.skip()
            if self.text.startswith(ch, self.pos):
                self.pos += 1
            else:
                raise self.fail(repr(lit))

    def accept(self, lit: str) -> bool:
        save = self.pos
        try:
            self.expect(lit)
            return True
        except ParseError:
            self.pos = save
            return False

    def integer(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise self.fail("integer")
        return int(self.text[start : self.pos])

    def span_from(self, start: int) -> SourceSpan:
        return SourceSpan(start, max(start, min(self.pos, len(self.text))))


def _semantic(sc: _Scanner, start: int, exc: Exception) -> ParseError:
    return ParseError(str(exc), sc.span_from(start), sc.text)


def _parse_star(sc: _Scanner) -> StarIndex:
    start = sc.pos
    sc.expect("zs(")
    slots = []
    while True:
        barred = sc.accept("b")
        value = sc.integer()
        slots.append((value, barred))
        if sc.accept(","):
            continue
        sc.expect(")")
        break
    try:
        return StarIndex(tuple(slots))
    except (ValueError, EulerSumError) as exc:
        raise _semantic(sc, start, exc) from None


def _parse_sum(sc: _Scanner) -> SumExpr:
    start = sc.pos
    sc.expect("sum(")
    factors: list[HarmonicFactor] = []
    sc.skip()
    if sc.peek("1"):
        sc.expect("1")
    else:
        while True:
            sc.skip()
            if sc.accept("H"):
                kind, arg = "H", 1
            elif sc.accept("L"):
                kind, arg = "L", sc.integer()
            elif sc.accept("Z"):
                kind, arg = "Z", sc.integer()
            elif sc.accept("h"):
                kind, arg = "h", sc.integer()
            else:
                raise sc.fail("one of H, L<k>, Z<k>, h<p> or 1")
            exp = sc.integer() if sc.accept("^") else 1
            try:
                factors.append(HarmonicFactor("H" if kind == "Z" and arg == 1 else kind, 1 if kind == "Z" and arg == 1 else arg, exp))
            except ValueError as exc:
                raise _semantic(sc, start, exc) from None
            if not sc.accept("*"):
                break
    alternating = False
    if sc.accept(","):
        sc.expect("alt")
        alternating = True
    sc.expect(")")
    sc.expect("/")
    if sc.accept("("):
        sc.expect("2n+1)^")
        denom = Denominator(sc.integer(), True)
    elif sc.accept("n"):
        sc.expect("^")
        denom = Denominator(sc.integer(), False)
    else:
        raise sc.fail("'n^' or '(2n+1)^'")
    try:
        return canonicalize(SumExpr(tuple(factors), alternating, denom))
    except (ValueError, EulerSumError) as exc:
        raise _semantic(sc, start, exc) from None


def _parse_query(sc: _Scanner) -> SumExpr | StarIndex:
    if sc.peek("zs"):
        return _parse_star(sc)
    if sc.peek("sum"):
        return _parse_sum(sc)
    raise sc.fail("'zs(' or 'sum('")


def parse(text: str) -> SumExpr | StarIndex:
    if not text or not text.strip():
        raise ParseError("empty input", SourceSpan(0, len(text)), text)
    sc = _Scanner(text)
    result = _parse_query(sc)
    if not sc.at_end():
        raise sc.fail("end of input")
    return result


def parse_sum(text: str) -> SumExpr:
    out = parse(text)
    if not isinstance(out, SumExpr):
        raise ParseError("expected a sum(...) expression", SourceSpan(0, len(text)), text)
    return out


def parse_star(text: str) -> StarIndex:
    out = parse(text)
    if not isinstance(out, StarIndex):
        raise ParseError("expected a zs(...) expression", SourceSpan(0, len(text)), text)
    return out


_ATOM_CODE = {"H": "H", "L": "L", "Z": "Z", "h": "h"}


def render(e: SumExpr | StarIndex) -> str:
    if isinstance(e, StarIndex):
        return "zs(" + ",".join(("b" if b else "") + str(v) for v, b in e.slots) + ")"
    parts = []
    for f in e.factors:
        code = "H" if f.kind == "H" else f"{f.kind}{f.arg}"
        parts.append(code if f.exponent == 1 else f"{code}^{f.exponent}")
    numer = "*".join(parts) or "1"
    alt = ", alt" if e.alternating else ""
    denom = f"(2n+1)^{e.denom.power}" if e.denom.odd else f"n^{e.denom.power}"
    return f"sum({numer}{alt})/{denom}"


# ---------------------------------------------------------------------------
# linear combinations


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render_monomial(mono) -> str:
    return "*".join(a.code() if e == 1 else f"{a.code()}^{e}" for a, e in mono)


def render_combo(c: LinearCombo) -> str:
    if not c.terms:
        return "0"
    out = []
    for i, (mono, coeff) in enumerate(c.terms):
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        body = render_monomial(mono)
        if not body:
            text = _fmt_coeff(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{_fmt_coeff(mag)}*{body}"
        if i == 0:
            out.append(("-" if sign == "-" else "") + text)
        else:
            out.append(f" {sign} {text}")
    return "".join(out)


def _parse_atom(sc: _Scanner) -> Atom:
    sc.skip()
    start = sc.pos
    if sc.peek("zs("):
        return ZS(_parse_star(sc))
    if sc.peek("sum("):
        return SUM(_parse_sum(sc))
    if sc.accept("ln2"):
        return LN2
    if sc.accept("li"):
        p = sc.integer()
        sc.expect("h")
        return LI(p)
    if sc.accept("zb"):
        return ZB(sc.integer())
    if sc.accept("z"):
        return Z(sc.integer())
    sc.skip()
    # aux atoms: name[w,args...]
    while sc.pos < len(sc.text) and (sc.text[sc.pos].isalnum() or sc.text[sc.pos] in "_."):
        sc.pos += 1
    name = sc.text[start : sc.pos]
    if name and sc.accept("["):
        nums = [sc.integer()]
        while sc.accept(","):
            nums.append(sc.integer())
        sc.expect("]")
        return AUX(name, nums[0], *nums[1:])
    sc.pos = start
    raise sc.fail("constant atom")


def parse_combo(text: str) -> LinearCombo:
    """Inverse of :func:`render_combo`."""
    sc = _Scanner(text)
    if sc.at_end():
        raise sc.fail("combination")
    terms = []
    sc.skip()
    if sc.peek("0") and sc.text.strip() == "0":
        return LinearCombo()
    first = True
    while not sc.at_end():
        sign = 1
        if sc.accept("-"):
            sign = -1
        elif not first:
            sc.expect("+")
        first = False
        sc.skip()
        coeff = Fraction(1)
        pairs: dict[Atom, int] = {}
        if sc.pos < len(sc.text) and sc.text[sc.pos].isdigit():
            num = sc.integer()
            den = sc.integer() if sc.accept("/") else 1
            coeff = Fraction(num, den)
            if not sc.accept("*"):
                terms.append(({}, sign * coeff))
                continue
        while True:
            atom = _parse_atom(sc)
            exp = sc.integer() if sc.accept("^") else 1
            pairs[atom] = pairs.get(atom, 0) + exp
            if not sc.accept("*"):
                break
        terms.append((pairs, sign * coeff))
    return LinearCombo.from_terms(terms)

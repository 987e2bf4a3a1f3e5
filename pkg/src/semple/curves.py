"""Text form of polynomial space curves, e.g. ``"2t, t^2/3, 0"``.

Each component is a sum of terms ``[+|-] coeff [*] t [^ n] [/ q]`` or a bare
rational constant.  Coefficients are integers, fractions ``p/q`` or finite
decimals, and are kept exact.  Spaces are ignored.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import OrderOverflow, ParseError
from .jets import TruncSeries
from .tower import DEFAULT_CURVE_ORDER, CurveJet


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self._skip()

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            self._skip()
            return True
        return False

    def fail(self, msg: str):
        raise ParseError(msg, self.pos)

    def digits(self) -> str:
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        out = self.text[start:self.pos]
        self._skip()
        return out

    def number(self) -> Fraction:
        whole = self.digits()
        if self.peek() == ".":
            self.pos += 1
            frac = self.digits()
            if not whole and not frac:
                self.fail("expected a number")
            return Fraction(whole + "." + (frac or "0") if whole else "0." + frac)
        if not whole:
            self.fail("expected a number")
        return Fraction(int(whole))

    def divisor(self) -> Fraction:
        start = self.pos
        q = self.number()
        if q == 0:
            self.pos = start
            self.fail("division by zero")
        return q


def _component(sc: _Scanner, order: int) -> dict:
    terms: dict[int, Fraction] = {}
    first = True
    while True:
        sign = 1
        if sc.take("-"):
            sign = -1
        elif sc.take("+"):
            pass
        elif not first:
            break
        first = False
        coeff = None
        if sc.peek().isdigit() or sc.peek() == ".":
            coeff = sc.number()
            if sc.take("/"):
                coeff /= sc.divisor()
        power = 0
        starred = coeff is not None and sc.take("*")
        if sc.take("t"):
            power = 1
            if sc.take("^"):
                at = sc.pos
                digits = sc.digits()
                if not digits or int(digits) == 0:
                    sc.pos = at
                    sc.fail("expected a positive exponent")
                power = int(digits)
                if power > order:
                    raise OrderOverflow("exponent %d exceeds working order %d" % (power, order))
            if sc.take("/"):
                coeff = (coeff if coeff is not None else Fraction(1)) / sc.divisor()
        elif coeff is None or starred:
            sc.fail("expected a term")
        c = sign * (coeff if coeff is not None else Fraction(1))
        terms[power] = terms.get(power, Fraction(0)) + c
        if sc.peek() in (",", ""):
            break
        if sc.peek() not in "+-":
            sc.fail("unexpected character %r" % sc.peek())
    return {k: v for k, v in terms.items() if v}


def parse_terms(text: str, order: int = DEFAULT_CURVE_ORDER) -> list:
    """The three components as ``{power: coefficient}`` dicts."""
    sc = _Scanner(text)
    comps = []
    for i in range(3):
        if i and not sc.take(","):
            sc.fail("expected ','")
        comps.append(_component(sc, order))
    if sc.peek():
        sc.fail("trailing input")
    return comps


def parse_curve(text: str, order: int = DEFAULT_CURVE_ORDER) -> CurveJet:
    comps = parse_terms(text, order)
    series = []
    for comp in comps:
        c = [Fraction(0)] * (order + 1)
        for k, v in comp.items():
            c[k] = v
        series.append(TruncSeries(c, order))
    return CurveJet(series)


def _term(power: int, c: Fraction, first: bool) -> str:
    sign = "-" if c < 0 else ("" if first else "+")
    a = abs(c)
    if power == 0:
        body = str(a)
    else:
        mono = "t" if power == 1 else "t^%d" % power
        body = mono if a == 1 else "%s*%s" % (a, mono)
    return body if first and sign == "" else (sign + body if first else " %s %s" % (sign, body))


def format_component(terms: dict) -> str:
    items = sorted((k, Fraction(v)) for k, v in terms.items() if v)
    if not items:
        return "0"
    return "".join(_term(k, c, i == 0) for i, (k, c) in enumerate(items))


def format_curve(c) -> str:
    """Canonical text of a curve jet (or of three term dicts)."""
    if isinstance(c, CurveJet):
        comps = [{k: s[k] for k in range(s.order + 1) if s[k]} for s in c.series]
    else:
        comps = c
    return ", ".join(format_component(t) for t in comps)

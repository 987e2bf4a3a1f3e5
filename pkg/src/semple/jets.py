"""Exact truncated power series and polynomial map jets over the rationals.

Three containers live here:

* :class:`TruncSeries` -- univariate series ``a_0 + a_1 t + ... + a_N t^N + O(t^{N+1})``
  used for curve germs.
* :class:`MultiSeries` -- multivariate series truncated at a total degree,
  with optional per-variable exponent caps.  A cap ``c`` on a variable means
  the computation is carried out modulo ``var^(c+1)``; this is an ideal, so
  every ring operation stays exact in the quotient.
* :class:`MapJet` -- a polynomial map jet R^3 -> R^3 expanded around a
  center, possibly depending on extra parameter variables.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg
from .errors import (BasePointMismatch, NonzeroConstantTerm, OrderMismatch,
                     SingularLinearPart, TruncationExhausted)

INF = math.inf


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class TruncSeries:
    """Univariate truncated power series with exact coefficients."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Iterable, order: int | None = None):
        coeffs = [_frac(c) for c in coeffs]
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise TruncationExhausted("series order dropped below zero")
        coeffs = coeffs[:order + 1]
        coeffs += [Fraction(0)] * (order + 1 - len(coeffs))
        self.order = order
        self.coeffs = tuple(coeffs)

    @classmethod
    def zero(cls, order: int) -> "TruncSeries":
        return cls([], order)

    @classmethod
    def monomial(cls, power: int, order: int, coeff=1) -> "TruncSeries":
        c = [0] * (order + 1)
        if power <= order:
            c[power] = coeff
        return cls(c, order)

    def _check(self, other):
        if not isinstance(other, TruncSeries):
            return TruncSeries([other], self.order)
        return other

    def __add__(self, other):
        other = self._check(other)
        n = min(self.order, other.order)
        return TruncSeries([a + b for a, b in zip(self.coeffs[:n + 1], other.coeffs[:n + 1])], n)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries([-a for a in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (n + 1)
        for i in range(n + 1):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(n + 1 - i):
                if b[j]:
                    out[i + j] += ai * b[j]
        return TruncSeries(out, n)

    __rmul__ = __mul__

    def scale(self, c) -> "TruncSeries":
        c = _frac(c)
        return TruncSeries([c * a for a in self.coeffs], self.order)

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def __getitem__(self, i):
        return self.coeffs[i]

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.order:
            raise OrderMismatch("cannot raise the order of a truncated series")
        return TruncSeries(self.coeffs[:order + 1], order)

    def valuation(self) -> int | None:
        """Index of the lowest nonzero coefficient, or None if zero at this order."""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        return None

    def is_zero(self) -> bool:
        return self.valuation() is None

    def derive(self) -> "TruncSeries":
        if self.order < 1:
            raise TruncationExhausted("cannot differentiate an order-0 series")
        return TruncSeries([i * c for i, c in enumerate(self.coeffs) if i > 0], self.order - 1)

    def shift_down(self, m: int) -> "TruncSeries":
        """Divide by t^m; the first m coefficients must vanish."""
        if any(self.coeffs[:m]):
            raise ValueError("series not divisible by t^%d" % m)
        return TruncSeries(self.coeffs[m:], self.order - m)

    def inverse(self) -> "TruncSeries":
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("series is not a unit")
        n = self.order
        inv0 = 1 / a[0]
        out = [inv0]
        for k in range(1, n + 1):
            s = sum((a[j] * out[k - j] for j in range(1, k + 1)), Fraction(0))
            out.append(-s * inv0)
        return TruncSeries(out, n)

    def __truediv__(self, other):
        """Exact quotient; the divisor may vanish at t=0 to order m, costing m orders."""
        if not isinstance(other, TruncSeries):
            return self.scale(1 / _frac(other))
        m = other.valuation()
        if m is None:
            raise ZeroDivisionError("division by a series that vanishes at working order")
        num = self.truncate(min(self.order, other.order)).shift_down(m)
        den = other.shift_down(m)
        n = min(num.order, den.order)
        return num.truncate(n) * den.truncate(n).inverse()

    def compose(self, inner: "TruncSeries") -> "TruncSeries":
        if inner.coeffs[0] != 0:
            raise NonzeroConstantTerm("inner series must vanish at t=0")
        n = min(self.order, inner.order)
        out = TruncSeries.zero(n)
        # Horner
        for c in reversed(self.coeffs[:n + 1]):
            out = out * inner.truncate(n) + c
        return out

    def __call__(self, value):
        return sum((c * _frac(value) ** i for i, c in enumerate(self.coeffs)), Fraction(0))

    def __repr__(self):
        return "TruncSeries(%s)" % self.to_string()

    def to_string(self, var="t") -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else (var if i == 1 else "%s^%d" % (var, i))
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(str(c) + ("*" + mono if mono else ""))
        body = " + ".join(terms).replace("+ -", "- ") if terms else "0"
        return "%s + O(%s^%d)" % (body, var, self.order + 1)


def _mono_deg(e):
    return sum(e)


class MultiSeries:
    """Multivariate series truncated at total degree ``order`` (``INF`` = exact polynomial)."""

    __slots__ = ("nvars", "order", "caps", "terms")

    def __init__(self, nvars: int, terms=None, order=INF, caps=None):
        self.nvars = nvars
        self.order = order
        self.caps = tuple(caps) if caps is not None else (None,) * nvars
        out = {}
        if terms:
            for e, c in terms.items():
                c = _frac(c)
                if c == 0 or _mono_deg(e) > order or not self._fits(e):
                    continue
                out[tuple(e)] = c
        self.terms = out

    def _fits(self, e):
        for x, cap in zip(e, self.caps):
            if cap is not None and x > cap:
                return False
        return True

    @classmethod
    def _raw(cls, nvars, terms, order, caps):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.order = order
        obj.caps = caps
        obj.terms = terms
        return obj

    @classmethod
    def constant(cls, nvars, c, order=INF, caps=None):
        return cls(nvars, {(0,) * nvars: c}, order, caps)

    @classmethod
    def var(cls, nvars, i, order=INF, caps=None):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1}, order, caps)

    def _merge_caps(self, other):
        if self.caps == other.caps:
            return self.caps
        out = []
        for a, b in zip(self.caps, other.caps):
            if a is None:
                out.append(b)
            elif b is None:
                out.append(a)
            else:
                out.append(min(a, b))
        return tuple(out)

    def _coerce(self, other):
        if isinstance(other, MultiSeries):
            if other.nvars != self.nvars:
                raise OrderMismatch("variable count mismatch")
            return other
        return MultiSeries.constant(self.nvars, other, INF, self.caps)

    def _filtered(self, terms, order, caps):
        terms = {e: c for e, c in terms.items()
                 if _mono_deg(e) <= order and all(cap is None or x <= cap for x, cap in zip(e, caps))}
        return MultiSeries._raw(self.nvars, terms, order, caps)

    def __add__(self, other):
        other = self._coerce(other)
        order = min(self.order, other.order)
        caps = self._merge_caps(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        if order < max(self.order, other.order) or caps != self.caps or caps != other.caps:
            return self._filtered(out, order, caps)
        return MultiSeries._raw(self.nvars, out, order, caps)

    __radd__ = __add__

    def __neg__(self):
        return MultiSeries._raw(self.nvars, {e: -c for e, c in self.terms.items()}, self.order, self.caps)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = _frac(c)
        if c == 0:
            return MultiSeries._raw(self.nvars, {}, self.order, self.caps)
        return MultiSeries._raw(self.nvars, {e: c * v for e, v in self.terms.items()}, self.order, self.caps)

    def __mul__(self, other):
        if not isinstance(other, MultiSeries):
            return self.scale(other)
        other = self._coerce(other)
        caps = self._merge_caps(other)
        # a term of degree da known exactly times unknown tail beyond other.order
        order = min(self.order + other.valuation_or_inf(), other.order + self.valuation_or_inf())
        capped = [i for i, c in enumerate(caps) if c is not None]
        out = {}
        bt = [(e, c, _mono_deg(e)) for e, c in other.terms.items()]
        for ea, ca in self.terms.items():
            da = _mono_deg(ea)
            for eb, cb, db in bt:
                if da + db > order:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                if capped and any(e[i] > caps[i] for i in capped):
                    continue
                v = out.get(e, 0) + ca * cb
                if v:
                    out[e] = v
                else:
                    del out[e]
        return MultiSeries._raw(self.nvars, out, order, caps)

    __rmul__ = __mul__

    def valuation_or_inf(self):
        if not self.terms:
            return self.order + 1 if self.order != INF else INF
        return min(_mono_deg(e) for e in self.terms)

    def __eq__(self, other):
        if isinstance(other, MultiSeries):
            return (self.nvars == other.nvars and self.order == other.order
                    and self.terms == other.terms)
        return NotImplemented

    def equal_to(self, other, order=None) -> bool:
        """Coefficientwise equality up to the given (or common) order."""
        n = min(self.order, other.order) if order is None else order
        keys = set(self.terms) | set(other.terms)
        return all(self.terms.get(e, 0) == other.terms.get(e, 0) for e in keys if _mono_deg(e) <= n)

    def __hash__(self):
        return hash((self.nvars, self.order, frozenset(self.terms.items())))

    def const(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def coeff(self, e) -> Fraction:
        return self.terms.get(tuple(e), Fraction(0))

    def truncate(self, order):
        if order >= self.order:
            return self
        return self._filtered(self.terms, order, self.caps)

    def with_caps(self, caps):
        return self._filtered(self.terms, self.order, tuple(caps))

    def deriv(self, i: int) -> "MultiSeries":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return MultiSeries._raw(self.nvars, out, self.order - 1, self.caps)

    def add_vars(self, k: int, caps=None) -> "MultiSeries":
        pad = (0,) * k
        caps = tuple(caps) if caps is not None else (None,) * k
        return MultiSeries._raw(self.nvars + k, {e + pad: c for e, c in self.terms.items()},
                                self.order, self.caps + caps)

    def drop_last_var(self) -> "MultiSeries":
        """Substitute 0 for the last variable and remove it."""
        out = {e[:-1]: c for e, c in self.terms.items() if e[-1] == 0}
        return MultiSeries._raw(self.nvars - 1, out, self.order, self.caps[:-1])

    def linear_coeff_in_last(self) -> "MultiSeries":
        """Coefficient of the last variable to first order: d/ds at s=0, with s removed."""
        return self.deriv(self.nvars - 1).drop_last_var()

    def inverse(self, order=None) -> "MultiSeries":
        c0 = self.const()
        if c0 == 0:
            raise ZeroDivisionError("series is not a unit")
        n = self.order if order is None else min(order, self.order)
        if n == INF:
            raise TruncationExhausted("inverse of an exact non-constant polynomial needs an order")
        one = MultiSeries.constant(self.nvars, 1, n, self.caps)
        h = (self.truncate(n) * (1 / c0)) - one       # self/c0 = 1 + h, h has no constant
        result = one
        power = one
        for _ in range(int(n)):
            power = power * (-h)
            if not power.terms:
                break
            result = result + power
        return result.scale(1 / c0)

    def __truediv__(self, other):
        if not isinstance(other, MultiSeries):
            return self.scale(1 / _frac(other))
        if not other.terms or (len(other.terms) == 1 and other.const() != 0):
            return self.scale(1 / other.const())
        n = min(self.order, other.order)
        return self.truncate(n) * other.inverse(n)

    def compose(self, subs: Sequence["MultiSeries"]) -> "MultiSeries":
        """Substitute ``subs[i]`` for variable i; every substitute must have zero constant term."""
        if len(subs) != self.nvars:
            raise OrderMismatch("need one substitute per variable")
        for s in subs:
            if s.const() != 0:
                raise NonzeroConstantTerm("substitutes must vanish at the origin")
        target = subs[0]
        order = min(s.order for s in subs)
        order = min(order, self.order)
        nv = target.nvars
        caps = subs[0].caps
        for s in subs[1:]:
            caps = MultiSeries._merge_caps(MultiSeries._raw(nv, {}, 0, caps), s)
        powers = [[MultiSeries.constant(nv, 1, order, caps)] for _ in subs]

        def pw(i, k):
            lst = powers[i]
            while len(lst) <= k:
                lst.append(lst[-1] * subs[i].truncate(order))
            return lst[k]

        out = MultiSeries._raw(nv, {}, order, caps)
        acc = {}
        for e, c in self.terms.items():
            if _mono_deg(e) > order:
                continue
            term = None
            for i, k in enumerate(e):
                if k:
                    p = pw(i, k)
                    term = p if term is None else term * p
            if term is None:
                term = MultiSeries.constant(nv, 1, order, caps)
            for f, v in term.terms.items():
                if _mono_deg(f) > order:
                    continue
                w = acc.get(f, 0) + c * v
                if w:
                    acc[f] = w
                else:
                    acc.pop(f, None)
        out.terms = acc
        return out

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= _frac(x) ** k
            total += v
        return total

    def __repr__(self):
        items = sorted(self.terms.items(), key=lambda kv: (_mono_deg(kv[0]), kv[0]))
        body = " + ".join("%s*%s" % (c, e) for e, c in items) or "0"
        return "MultiSeries[%d vars, order %s](%s)" % (self.nvars, self.order, body)


def _monomials(nvars, degree):
    """Exponent tuples of total degree exactly ``degree`` in canonical (graded lex) order."""
    if nvars == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in _monomials(nvars - 1, degree - first):
            yield (first,) + rest


def monomials_upto(nvars, degree, start=0):
    for d in range(start, degree + 1):
        yield from _monomials(nvars, d)


class MapJet:
    """Polynomial jet of a map R^3 -> R^3.

    ``components[i]`` is a series in the shifted variables ``X - center``
    (first three variables) plus ``nparams`` trailing parameter variables.
    The truncation degree is the series order.
    """

    __slots__ = ("center", "components", "degree", "nparams")

    def __init__(self, components: Sequence[MultiSeries], degree: int, center=(0, 0, 0), nparams: int = 0):
        if len(components) != 3:
            raise ValueError("a map jet has three components")
        self.degree = degree
        self.nparams = nparams
        self.center = tuple(_frac(c) for c in center)
        self.components = tuple(c.truncate(degree) if c.order > degree else c for c in components)
        for c in self.components:
            if c.nvars != 3 + nparams:
                raise OrderMismatch("component variable count mismatch")
            if c.order < degree:
                raise OrderMismatch("component known to lower order than the jet degree")

    @classmethod
    def from_terms(cls, polys: Sequence[dict], degree: int, center=(0, 0, 0)) -> "MapJet":
        """Build from ``[{(a,b,c): coeff, ...}, ...]`` in shifted coordinates."""
        comps = [MultiSeries(3, p, degree) for p in polys]
        return cls(comps, degree, center)

    @classmethod
    def identity(cls, degree: int, center=(0, 0, 0)) -> "MapJet":
        c = [_frac(x) for x in center]
        comps = [MultiSeries(3, {(0, 0, 0): c[i], tuple(int(j == i) for j in range(3)): 1}, degree)
                 for i in range(3)]
        return cls(comps, degree, center)

    @classmethod
    def linear(cls, matrix, degree: int, shift=(0, 0, 0)) -> "MapJet":
        polys = []
        for i in range(3):
            p = {(0, 0, 0): shift[i]}
            for j in range(3):
                p[tuple(int(k == j) for k in range(3))] = matrix[i][j]
            polys.append(p)
        return cls.from_terms(polys, degree)

    @property
    def image_of_center(self):
        return tuple(c.const() for c in self.components)

    def linear_part(self):
        return [[c.coeff(tuple(int(k == j) for k in range(3)) + (0,) * self.nparams)
                 for j in range(3)] for c in self.components]

    def determinant(self):
        return linalg.det3(self.linear_part())

    def truncate(self, degree: int) -> "MapJet":
        return MapJet([c.truncate(degree) for c in self.components], degree, self.center, self.nparams)

    def __eq__(self, other):
        if not isinstance(other, MapJet):
            return NotImplemented
        return (self.degree == other.degree and self.center == other.center
                and all(a.terms == b.terms for a, b in zip(self.components, other.components)))

    def __hash__(self):
        return hash((self.degree, self.center))

    def substitute(self, coords: Sequence[MultiSeries], params: Sequence[MultiSeries] = ()) -> list:
        """Evaluate on series ``coords`` (absolute coordinates, must pass through the center)."""
        shifted = []
        for s, c in zip(coords, self.center):
            if s.const() != c:
                raise BasePointMismatch("argument does not pass through the jet center")
            shifted.append(s - c)
        subs = shifted + list(params)
        return [comp.compose(subs) for comp in self.components]

    def compose(self, inner: "MapJet") -> "MapJet":
        """``self ∘ inner``, truncated at the smaller degree."""
        if self.nparams or inner.nparams:
            raise ValueError("composition of parametrized jets is not supported")
        d = min(self.degree, inner.degree)
        if inner.image_of_center != self.center:
            raise BasePointMismatch("inner jet does not land on the outer jet's center")
        coords = [c.truncate(d) for c in inner.components]
        comps = self.truncate(d).substitute(coords)
        return MapJet(comps, d, inner.center)

    __matmul__ = compose

    def invert(self) -> "MapJet":
        if self.nparams:
            raise ValueError("cannot invert a parametrized jet")
        lin = self.linear_part()
        if linalg.det3(lin) == 0:
            raise SingularLinearPart("linear part is singular")
        inv = linalg.inverse(lin)
        d = self.degree
        f0 = self.image_of_center
        ys = [MultiSeries.var(3, i, d) for i in range(3)]
        # nonlinear part N of f (in shifted coordinates)
        nonlin = [MultiSeries(3, {e: c for e, c in comp.terms.items() if sum(e) >= 2}, d)
                  for comp in self.components]
        h = [sum((ys[j].scale(inv[i][j]) for j in range(3)), MultiSeries(3, {}, d)) for i in range(3)]
        for _ in range(d):
            nh = [n.compose(h) for n in nonlin]
            rhs = [ys[i] - nh[i] for i in range(3)]
            h = [sum((rhs[j].scale(inv[i][j]) for j in range(3)), MultiSeries(3, {}, d)) for i in range(3)]
        comps = [h[i] + self.center[i] for i in range(3)]
        return MapJet(comps, d, f0)

    def apply_curve(self, curve):
        """Component-wise substitution of a curve germ (see :class:`semple.tower.CurveJet`)."""
        from .tower import CurveJet
        if tuple(curve.base) != self.center:
            raise BasePointMismatch("curve does not start at the jet center")
        n = curve.order
        shifted = [s - b for s, b in zip(curve.series, self.center)]
        out = []
        for comp in self.components:
            acc = TruncSeries.zero(n)
            for e, c in comp.terms.items():
                term = TruncSeries([c], n)
                for i, k in enumerate(e[:3]):
                    for _ in range(k):
                        term = term * shifted[i]
                acc = acc + term
            out.append(acc)
        return CurveJet(out)

    def __repr__(self):
        return "MapJet(degree=%d, center=%s, %s)" % (self.degree, self.center, list(self.components))

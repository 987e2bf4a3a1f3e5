"""Points, curves and frames of the spatial Semple tower S(2;k).

A level-k point is stored as a chart address: the base point in R^3 and one
:class:`ChartStep` per level.  The chart coordinates are
``(x, y, z, u_1, v_1, ..., u_k, v_k)``.  The distribution at level k is framed
recursively: level 0 uses ``(dx, dy, dz)``; a step with pivot ``i`` and fiber
coordinates ``(u, v)`` produces ``(F_i + u F_j + v F_l, du, dv)`` where ``j < l``
are the two non-pivot indices.  Pivots are 0-based.

The helpers :func:`frame_coords` and :func:`frame_vector` are generic over the
scalar ring: they work on Fractions, :class:`TruncSeries` and
:class:`MultiSeries` alike.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (ChartEscape, ConstantCurve, LevelOutOfRange,
                     TruncationExhausted, ZeroDirection)
from .jets import MultiSeries, TruncSeries

DEFAULT_CURVE_ORDER = 24

ORIGIN = (Fraction(0), Fraction(0), Fraction(0))


def others(pivot: int) -> tuple[int, int]:
    return tuple(i for i in range(3) if i != pivot)


def u_index(level: int) -> int:
    """Chart coordinate index of u at the given level (1-based level)."""
    return 3 + 2 * (level - 1)


def chart_dimension(level: int) -> int:
    return 3 + 2 * level


@dataclass(frozen=True)
class ChartStep:
    pivot: int
    u: Fraction
    v: Fraction

    def direction(self) -> tuple:
        """Homogeneous frame coordinates of the line this step records."""
        d = [None, None, None]
        j, l = others(self.pivot)
        d[self.pivot] = Fraction(1)
        d[j] = self.u
        d[l] = self.v
        return tuple(d)


def step_from_direction(d: Sequence, pivot: int | None = None) -> ChartStep:
    d = [Fraction(x) for x in d]
    if pivot is None:
        pivot = next((i for i, x in enumerate(d) if x != 0), None)
        if pivot is None:
            raise ZeroDirection("direction vector is zero")
    elif d[pivot] == 0:
        raise ChartEscape("pivot entry of the direction is zero")
    j, l = others(pivot)
    return ChartStep(pivot, d[j] / d[pivot], d[l] / d[pivot])


@dataclass(frozen=True)
class TowerPoint:
    base: tuple = ORIGIN
    steps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(Fraction(b) for b in self.base))
        object.__setattr__(self, "steps", tuple(self.steps))

    @property
    def level(self) -> int:
        return len(self.steps)

    @property
    def pivots(self) -> tuple:
        return tuple(s.pivot for s in self.steps)

    def coords(self) -> list:
        out = list(self.base)
        for s in self.steps:
            out += [s.u, s.v]
        return out

    def direction(self, level: int) -> tuple:
        """Frame coordinates (at the level-1 point) of the line chosen at ``level``."""
        return self.steps[level - 1].direction()

    def is_canonical(self) -> bool:
        return all(step_from_direction(s.direction()) == s for s in self.steps)

    def to_json(self) -> dict:
        return {"base": [str(b) for b in self.base],
                "steps": [{"pivot": s.pivot + 1, "u": str(s.u), "v": str(s.v)} for s in self.steps]}

    def __str__(self):
        parts = ["(%s)" % ",".join(str(b) for b in self.base)]
        parts += ["[%d|%s,%s]" % (s.pivot + 1, s.u, s.v) for s in self.steps]
        return "".join(parts)


def prolong_point(p: TowerPoint, d: Sequence, pivot: int | None = None) -> TowerPoint:
    return TowerPoint(p.base, p.steps + (step_from_direction(d, pivot),))


def project(p: TowerPoint, j: int) -> TowerPoint:
    if not 0 <= j <= p.level:
        raise LevelOutOfRange("cannot project a level-%d point to level %d" % (p.level, j))
    return TowerPoint(p.base, p.steps[:j])


def frame_coords(vec: Sequence, pivots: Sequence[int]) -> list:
    """Frame coordinates of a horizontal vector given by its chart components."""
    w = list(vec[:3])
    for i, piv in enumerate(pivots, start=1):
        k = u_index(i)
        w = [w[piv], vec[k], vec[k + 1]]
    return w


def frame_vector(a: Sequence, coords: Sequence, pivots: Sequence[int]) -> list:
    """Chart components of ``a[0] F_1 + a[1] F_2 + a[2] F_3`` at the chart point ``coords``."""
    m = len(pivots)
    comps = [0] * chart_dimension(m)
    a = list(a)
    for level in range(m, 0, -1):
        k = u_index(level)
        piv = pivots[level - 1]
        j, l = others(piv)
        comps[k], comps[k + 1] = a[1], a[2]
        b = [0, 0, 0]
        b[piv] = a[0]
        b[j] = a[0] * coords[k]
        b[l] = a[0] * coords[k + 1]
        a = b
    comps[:3] = a
    return comps


def horizontality_residuals(vec: Sequence, coords: Sequence, pivots: Sequence[int]) -> list:
    """Contact conditions ``w_j - u w_pivot``, ``w_l - v w_pivot`` per level; all zero iff horizontal."""
    out = []
    w = list(vec[:3])
    for i, piv in enumerate(pivots, start=1):
        k = u_index(i)
        j, l = others(piv)
        out.append(w[j] - coords[k] * w[piv])
        out.append(w[l] - coords[k + 1] * w[piv])
        w = [w[piv], vec[k], vec[k + 1]]
    return out


@dataclass(frozen=True)
class Frame:
    """Recursive frame of the distribution on the chart fixed by a pivot sequence."""

    pivots: tuple

    @property
    def level(self) -> int:
        return len(self.pivots)

    def chart_variables(self) -> list:
        n = chart_dimension(self.level)
        return [MultiSeries.var(n, i) for i in range(n)]

    def fields(self) -> list:
        """The three frame fields as exact polynomial vector fields in chart coordinates."""
        coords = self.chart_variables()
        n = len(coords)
        out = []
        for a in range(3):
            e = [int(a == b) for b in range(3)]
            comps = frame_vector(e, coords, self.pivots)
            out.append([c if isinstance(c, MultiSeries) else MultiSeries.constant(n, c) for c in comps])
        return out

    def at(self, p: TowerPoint) -> list:
        """Frame fields evaluated at a point: three lists of chart components."""
        coords = p.coords()
        return [[Fraction(c) for c in frame_vector([int(a == b) for b in range(3)], coords, self.pivots)]
                for a in range(3)]

    def describe(self) -> list:
        names = ["x", "y", "z"]
        for i in range(1, self.level + 1):
            names += ["u%d" % i, "v%d" % i]
        out = []
        for fld in self.fields():
            terms = []
            for name, comp in zip(names, fld):
                if comp.terms:
                    coeff = " + ".join(_mono_str(e, c, names) for e, c in sorted(comp.terms.items()))
                    terms.append("(%s)d%s" % (coeff, name) if len(comp.terms) > 1 or comp.const() != 1
                                 else "d" + name)
            out.append(" + ".join(terms))
        return out


def _mono_str(e, c, names):
    factors = [n if k == 1 else "%s^%d" % (n, k) for n, k in zip(names, e) if k]
    if not factors:
        return str(c)
    body = "*".join(factors)
    return body if c == 1 else "%s*%s" % (c, body)


def frame_at(p: TowerPoint) -> Frame:
    return Frame(p.pivots)


class CurveJet:
    """Curve germ (R,0) -> R^3 given by three truncated series sharing one order."""

    __slots__ = ("series",)

    def __init__(self, series: Sequence[TruncSeries], check: bool = True):
        if len(series) != 3:
            raise ValueError("a space curve has three components")
        n = min(s.order for s in series)
        self.series = tuple(s.truncate(n) for s in series)
        if check and all(s.truncate(n) == TruncSeries([s[0]], n) for s in self.series):
            raise ConstantCurve("curve germ is constant at working order")

    @classmethod
    def from_monomials(cls, comps, order: int = DEFAULT_CURVE_ORDER) -> "CurveJet":
        """``comps[i]`` is ``{power: coeff}`` for coordinate i."""
        out = []
        for comp in comps:
            c = [0] * (order + 1)
            for k, v in comp.items():
                c[k] += v
            out.append(TruncSeries(c, order))
        return cls(out)

    @property
    def order(self) -> int:
        return self.series[0].order

    @property
    def base(self) -> tuple:
        return tuple(s[0] for s in self.series)

    def reparametrize(self, phi: TruncSeries) -> "CurveJet":
        return CurveJet([s.compose(phi) for s in self.series])

    def __eq__(self, other):
        return isinstance(other, CurveJet) and self.series == other.series

    def __hash__(self):
        return hash(self.series)

    def __repr__(self):
        return "CurveJet(%s)" % ", ".join(s.to_string() for s in self.series)


@dataclass
class Prolongation:
    """Result of lifting a curve germ: the point, chosen directions and lifted series."""

    point: TowerPoint
    directions: list = field(default_factory=list)
    chart_series: list = field(default_factory=list)   # chart coordinates along c^k
    velocity: list = field(default_factory=list)       # frame coordinates of d(c^k)/dt


def _lowest_vector(w: Sequence[TruncSeries]):
    vals = [s.valuation() for s in w]
    present = [v for v in vals if v is not None]
    if not present:
        return None, None
    m = min(present)
    return m, tuple(s[m] if s.order >= m else Fraction(0) for s in w)


def _lift(c: CurveJet, k: int, pivots: Sequence[int] | None = None) -> Prolongation:
    base = c.base
    coords = list(c.series)
    w = [s.derive() for s in c.series]
    steps, dirs = [], []
    for level in range(1, k + 1):
        m, d = _lowest_vector(w)
        if m is None:
            if level == 1:
                raise ConstantCurve("curve germ is constant at working order")
            raise TruncationExhausted(
                "velocity vanishes identically at level %d; increase the curve order" % level)
        forced = pivots[level - 1] if pivots is not None else None
        if forced is not None and d[forced] == 0:
            raise ChartEscape("curve leaves the chart at level %d" % level)
        step = step_from_direction(d, forced)
        piv = step.pivot
        j, l = others(piv)
        try:
            u = w[j] / w[piv]
            v = w[l] / w[piv]
        except (ZeroDivisionError, TruncationExhausted) as exc:
            raise TruncationExhausted("working order exhausted at level %d" % level) from exc
        steps.append(ChartStep(piv, u[0], v[0]))
        dirs.append(tuple(x / d[piv] for x in d))
        coords += [u, v]
        try:
            w = [w[piv], u.derive(), v.derive()]
        except TruncationExhausted:
            if level < k:
                raise
            w = []
    return Prolongation(TowerPoint(base, steps), dirs, coords, w)


def prolong_curve(c: CurveJet, k: int) -> Prolongation:
    """Lift ``c`` to level ``k``; the direction at each level is the lowest-order velocity vector."""
    return _lift(c, k)


def velocity_in_frame(c: CurveJet, pivots: Sequence[int]) -> list:
    """Frame coordinates of the velocity of the lifted curve in the chart ``pivots``."""
    return _lift(c, len(pivots), pivots).velocity

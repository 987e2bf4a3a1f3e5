"""Critical planes, RVT letters and class enumeration.

Every critical plane at a level-k point is carried together with a
horizontal submanifold germ ``M`` through the point whose tangent space meets
the distribution exactly in that plane.  The vertical plane at level k comes
from the fiber over the level k-1 point.  When the chosen direction lies in a
critical plane, the germ is prolonged:
``M' = {(q, m) : q in M, m a line in T_q M ∩ Δ}``, and the plane one level up
is ``T M' ∩ Δ``.  A prolonged vertical is a tangency plane; its tag is the
level at which the vertical was born.

A germ is stored as a polynomial parametrization ``s -> chart coordinates``
plus two parameter-space vector fields ``E1, E2`` spanning ``T M ∩ Δ``.  For
``M'`` with parameters ``(s, sigma)`` and ``m = E1 + (lambda0 + sigma) E2``
the plane is spanned by ``d/dsigma`` and ``(m, 0)``, so no linear solve is
ever needed after the first level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from . import linalg
from .errors import DegenerateGerm, NoVerticalAtLevelZero, TruncationExhausted
from .jets import INF, MultiSeries
from .tower import (CurveJet, TowerPoint, frame_coords, others, prolong_curve,
                    prolong_point, u_index)

DEFAULT_GERM_ORDER = 6


@dataclass(frozen=True)
class HorizontalGerm:
    pivots: tuple
    coords: tuple
    fields: tuple
    nparams: int

    def pushforward(self, vec: Sequence) -> list:
        return _pushforward(self.coords, vec)

    def frame_field(self, vec: Sequence) -> list:
        return frame_coords(self.pushforward(vec), self.pivots)

    def plane_vectors(self) -> tuple:
        out = []
        for e in self.fields:
            w = self.frame_field(e)
            for x in w:
                if x.order < 0:
                    raise TruncationExhausted("germ order exhausted")
            out.append([x.const() for x in w])
        return tuple(out)

    def normal(self) -> tuple:
        w1, w2 = self.plane_vectors()
        n = linalg.cross(w1, w2)
        if all(x == 0 for x in n):
            raise DegenerateGerm("tangent space of the germ meets the distribution in rank < 2")
        return linalg.normalize_projective(n)

    def prolong(self, d: Sequence, pivot: int, order: int) -> "HorizontalGerm":
        w1, w2 = self.plane_vectors()
        coef = linalg.solve([[w1[i], w2[i]] for i in range(3)], list(d))
        if coef is None:
            raise ValueError("direction does not lie in the germ's plane")
        alpha, beta = coef
        n = self.nparams
        nn = n + 1
        coords = [c.add_vars(1) for c in self.coords]
        e1 = [x.add_vars(1) for x in self.fields[0]]
        e2 = [x.add_vars(1) for x in self.fields[1]]
        sigma = MultiSeries.var(nn, n)
        if alpha != 0:
            lam = sigma + beta / alpha
            m = [a + lam * b for a, b in zip(e1, e2)]
        else:
            m = [sigma * a + b for a, b in zip(e1, e2)]
        zero = MultiSeries(nn, {}, INF)
        m.append(zero)
        w = frame_coords(_pushforward(coords, m), self.pivots)
        j, l = others(pivot)
        wp = w[pivot].truncate(order) if w[pivot].order > order else w[pivot]
        u = (w[j] / wp).truncate(order)
        v = (w[l] / wp).truncate(order)
        one_sigma = tuple([zero] * n + [MultiSeries.constant(nn, 1)])
        return HorizontalGerm(self.pivots + (pivot,), tuple(coords) + (u, v),
                              (one_sigma, tuple(m)), nn)


def _pushforward(coords, vec):
    """Chart components of the tangent vector ``sum_b vec[b] d/ds_b`` along a parametrization."""
    n = coords[0].nvars
    out = []
    for c in coords:
        acc = MultiSeries(n, {}, INF)
        for b in range(n):
            if not vec[b].terms:
                continue
            dc = c.deriv(b)
            acc = acc + vec[b] * dc if dc.terms else acc + MultiSeries(n, {}, dc.order)
        out.append(acc)
    return out


def vertical_germ(p: TowerPoint) -> HorizontalGerm:
    """The fiber over the level k-1 point, parametrized by the two fiber coordinates."""
    k = p.level
    if k == 0:
        raise NoVerticalAtLevelZero("no vertical plane over level 0")
    coords = [MultiSeries.constant(2, c) for c in p.coords()]
    iu = u_index(k)
    coords[iu] = coords[iu] + MultiSeries.var(2, 0)
    coords[iu + 1] = coords[iu + 1] + MultiSeries.var(2, 1)
    e1 = (MultiSeries.constant(2, 1), MultiSeries(2, {}))
    e2 = (MultiSeries(2, {}), MultiSeries.constant(2, 1))
    return HorizontalGerm(p.pivots, tuple(coords), (e1, e2), 2)


VERTICAL = "V"
TANGENCY = "T"


@dataclass(frozen=True)
class CriticalPlane:
    normal: tuple
    kind: str
    tag: int
    germ: HorizontalGerm = field(compare=False, repr=False)

    def contains(self, d: Sequence) -> bool:
        return linalg.dot(self.normal, d) == 0

    def to_json(self) -> dict:
        return {"kind": "vertical" if self.kind == VERTICAL else "tangency",
                "born_at_level": self.tag, "normal": [str(x) for x in self.normal]}


def vertical_plane(p: TowerPoint) -> CriticalPlane:
    germ = vertical_germ(p)
    return CriticalPlane(germ.normal(), VERTICAL, p.level, germ)


@dataclass(frozen=True)
class Letter:
    symbol: str
    tags: frozenset = frozenset()
    label: str = ""

    def __str__(self):
        return self.label or self.symbol


@dataclass(frozen=True)
class RVTWord:
    letters: tuple

    def __str__(self):
        return "".join(str(x) for x in self.letters)

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        if isinstance(other, RVTWord):
            return str(self) == str(other)
        if isinstance(other, str):
            return str(self) == other
        return NotImplemented

    def __hash__(self):
        return hash(str(self))

    def prefix(self, n: int) -> "RVTWord":
        return RVTWord(self.letters[:n])


@dataclass(frozen=True)
class Arrangement:
    point: TowerPoint
    planes: tuple = ()
    coincidences: tuple = ()

    @property
    def tangency_tags(self) -> list:
        return sorted({pl.tag for pl in self.planes if pl.kind == TANGENCY})

    def lines(self) -> list:
        """Distinct normals (projective lines in the fiber)."""
        seen = []
        for pl in self.planes:
            if pl.normal not in seen:
                seen.append(pl.normal)
        return seen

    def letter(self, d: Sequence) -> Letter:
        inside = [pl for pl in self.planes if pl.contains(d)]
        vert = any(pl.kind == VERTICAL for pl in inside)
        tags = frozenset(pl.tag for pl in inside if pl.kind == TANGENCY)
        if not inside:
            sym = "R"
        elif not tags:
            sym = "V"
        elif not vert:
            sym = "T"
        else:
            sym = "L"
        label = sym
        all_tags = self.tangency_tags
        if tags and len(all_tags) > 1:
            label += "".join(str(all_tags.index(t) + 1) for t in sorted(tags))
        return Letter(sym, tags, label)

    def propagate(self, d: Sequence, germ_order: int = DEFAULT_GERM_ORDER) -> "Arrangement":
        q = prolong_point(self.point, d)
        piv = q.steps[-1].pivot
        planes = [vertical_plane(q)]
        for pl in self.planes:
            if pl.contains(d):
                germ = pl.germ.prolong(d, piv, germ_order)
                planes.append(CriticalPlane(germ.normal(), TANGENCY, pl.tag, germ))
        coincident = []
        for a in range(len(planes)):
            for b in range(a + 1, len(planes)):
                if planes[a].normal == planes[b].normal:
                    coincident.append((planes[a].tag, planes[b].tag))
        return Arrangement(q, tuple(planes), tuple(coincident))

    def strata(self) -> list:
        return fiber_strata(self.lines())

    def to_json(self) -> dict:
        return {"planes": [pl.to_json() for pl in self.planes],
                "coincident": [list(c) for c in self.coincidences]}


def root_arrangement(base=(0, 0, 0)) -> Arrangement:
    return Arrangement(TowerPoint(base, ()))


def arrangements_along(p: TowerPoint, germ_order: int = DEFAULT_GERM_ORDER) -> list:
    """Arrangements at p's projections to levels 0..k."""
    arr = root_arrangement(p.base)
    out = [arr]
    for i in range(1, p.level + 1):
        arr = arr.propagate(p.direction(i), germ_order)
        out.append(arr)
    return out


def rvt_letter(d: Sequence, arrangement: Arrangement) -> Letter:
    return arrangement.letter(d)


def rvt_code_point(p: TowerPoint, germ_order: int = DEFAULT_GERM_ORDER) -> RVTWord:
    arr = root_arrangement(p.base)
    letters = []
    for i in range(1, p.level + 1):
        d = p.direction(i)
        letters.append(arr.letter(d))
        if i < p.level:
            arr = arr.propagate(d, germ_order)
    return RVTWord(tuple(letters))


def rvt_code(c: CurveJet, k: int, germ_order: int = DEFAULT_GERM_ORDER) -> RVTWord:
    """Code of a curve, letters taken from the lowest-order velocity directions."""
    pr = prolong_curve(c, k)
    arr = root_arrangement(c.base)
    letters = []
    for i, d in enumerate(pr.directions, start=1):
        letters.append(arr.letter(d))
        if i < k:
            arr = arr.propagate(d, germ_order)
    return RVTWord(tuple(letters))


# --- fiber strata -------------------------------------------------------

@dataclass(frozen=True)
class Stratum:
    kind: str            # "open", "line" or "point"
    representative: tuple
    lines: tuple         # normals of the lines containing the stratum

    @property
    def dimension(self) -> int:
        return {"open": 2, "line": 1, "point": 0}[self.kind]


def _integer_vectors(height):
    rng = range(-height, height + 1)
    vecs = []
    for v in product(rng, rng, rng):
        if max(abs(x) for x in v) != height:
            continue
        first = next(x for x in v if x != 0)
        if first < 0:
            continue
        vecs.append(v)
    vecs.sort(key=lambda v: (sum(abs(x) for x in v), [-abs(x) for x in v], v))
    return vecs


def _small_vectors(max_height=6):
    for h in range(1, max_height + 1):
        for v in _integer_vectors(h):
            yield tuple(Fraction(x) for x in v)


def fiber_strata(normals: Sequence) -> list:
    """Strata of P^2 cut out by lines; representatives are small-height integer vectors."""
    normals = [tuple(n) for n in normals]
    points = []
    for a in range(len(normals)):
        for b in range(a + 1, len(normals)):
            x = linalg.cross(normals[a], normals[b])
            if any(x):
                x = linalg.normalize_projective(x)
                if x not in points:
                    points.append(x)
    out = []
    for v in _small_vectors():
        if all(linalg.dot(n, v) != 0 for n in normals):
            out.append(Stratum("open", v, ()))
            break
    for n in normals:
        for v in _small_vectors():
            if linalg.dot(n, v) == 0 and all(linalg.dot(m, v) != 0 for m in normals if m != n):
                out.append(Stratum("line", linalg.normalize_projective(v), (n,)))
                break
    for x in points:
        through = tuple(n for n in normals if linalg.dot(n, x) == 0)
        out.append(Stratum("point", x, through))
    return out


# --- class enumeration --------------------------------------------------

@dataclass
class ClassNode:
    word: RVTWord
    arrangement: Arrangement
    stratum: Stratum | None = None

    @property
    def point(self) -> TowerPoint:
        return self.arrangement.point


def class_tree(k: int, germ_order: int = DEFAULT_GERM_ORDER) -> dict:
    """Walk the stratum tree to level k; returns ``{word: [ClassNode, ...]}`` per level."""
    levels = {0: [ClassNode(RVTWord(()), root_arrangement())]}
    for level in range(1, k + 1):
        nodes = []
        for node in levels[level - 1]:
            arr = node.arrangement
            for st in arr.strata():
                d = st.representative
                letter = arr.letter(d)
                if level < k:
                    child = arr.propagate(d, germ_order)
                else:
                    child = Arrangement(prolong_point(arr.point, d))
                nodes.append(ClassNode(RVTWord(node.word.letters + (letter,)), child, st))
        levels[level] = nodes
    return levels


def enumerate_classes(k: int, germ_order: int = DEFAULT_GERM_ORDER) -> list:
    if k < 1:
        raise ValueError("level must be at least 1")
    tree = class_tree(k, germ_order)
    words = []
    for node in tree[k]:
        if node.word not in words:
            words.append(node.word)
    return sorted(words, key=str)

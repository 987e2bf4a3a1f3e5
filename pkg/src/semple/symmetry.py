"""Isotropy groups, fiber orbits, orbit counts and equivalence of tower points.

The isotropy group ``G(p)`` of a level-m point acts on the fiber P^2 over p by
projective transformations.  Its Lie algebra is computed exactly: a vector field
jet ``xi`` (vanishing at the base) belongs to it when its prolongation vanishes
at p, and the induced action on the fiber is a 3x3 matrix per basis element.

Orbits on a stratum S of the critical arrangement are then read off from rank
data.  S is irreducible and invariant, so the points where the infinitesimal
orbit has full dimension form one open orbit; the remaining locus is closed,
invariant and of smaller dimension, and is decomposed the same way.  Counts are
for the identity component acting over the complexified fiber, restricted to
pieces that have real points.

Witnesses are exact jets found by staged linear solves: the condition at each
level is affine in one block of jet coefficients, so blocks are solved in order
of degree, with free coefficients sampled from a seeded generator.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

import sympy as sp

from . import linalg
from .critical import (Arrangement, _small_vectors, arrangements_along,
                       enumerate_classes, fiber_strata, rvt_code_point)
from .errors import (ConstraintInconsistent, LevelMismatch, SempleError,
                     UnrealizableClass)
from .jets import MapJet, MultiSeries, _monomials
from .prolong import (canonical_chart, field_basis, image_direction, infinitesimal_action,
                      jet_from_vector, prolong_diffeo)
from .tower import TowerPoint, others, project, prolong_point

DiffeoJet = MapJet


# --- isotropy algebra ---------------------------------------------------

@dataclass
class IsotropyAlgebra:
    point: TowerPoint
    degree: int
    basis: list
    elements: list            # coefficient vectors over ``basis``
    fiber_matrices: list      # induced 3x3 action on the fiber over ``point``

    @property
    def dimension(self) -> int:
        return len(self.elements)

    def orbit_dimension(self, d: Sequence) -> int:
        """Dimension of the infinitesimal orbit of the fiber direction d."""
        return _orbit_dim(self.fiber_matrices, d)


def isotropy_algebra(p: TowerPoint, degree: int | None = None) -> IsotropyAlgebra:
    """Lie algebra of the stabilizer of p among jets of the given degree (default level + 1)."""
    degree = degree or p.level + 1
    basis = field_basis(degree)
    values, mats = [], []
    for b in basis:
        v, a = infinitesimal_action({b: 1}, p, degree)
        values.append(v)
        mats.append(a)
    rows = [[v[i] for v in values] for i in range(len(values[0]))]
    kernel = linalg.nullspace(rows)
    fiber = []
    for kv in kernel:
        fiber.append([[sum((c * m[i][j] for c, m in zip(kv, mats) if c), Fraction(0))
                       for j in range(3)] for i in range(3)])
    return IsotropyAlgebra(p, degree, basis, kernel, fiber)


def _orbit_dim(mats, d) -> int:
    d = [Fraction(x) for x in d]
    return linalg.rank([d] + [linalg.matvec(a, d) for a in mats]) - 1


# --- orbits on a fiber stratum ------------------------------------------

_X = sp.symbols("x0:3")
_S, _T = sp.symbols("s t")


@dataclass
class OrbitPiece:
    """One orbit (or a family flagged as moduli) inside a fiber stratum."""

    kind: str                 # "open", "curve", "point"
    dimension: int
    representative: tuple | None
    locus: str
    count: int = 1
    moduli: bool = False

    def to_json(self) -> dict:
        return {"kind": self.kind, "dimension": self.dimension,
                "representative": None if self.representative is None
                else [str(x) for x in self.representative],
                "locus": self.locus, "count": self.count, "moduli_suspected": self.moduli}


def _sym_apply(a, x):
    return [sum(sp.Rational(a[i][j].numerator, a[i][j].denominator) * x[j] for j in range(3))
            for i in range(3)]


def _nonzero(polys):
    return [sp.expand(f) for f in polys if sp.expand(f) != 0]


def _gcd(polys):
    return reduce(sp.gcd, polys)


def _in_stratum(x, normals, on) -> bool:
    return all((linalg.dot(n, x) == 0) == (n in on) for n in normals)


def _to_frac(v):
    return tuple(Fraction(int(sp.numer(c)), int(sp.denom(c))) for c in v)


def _is_line_of(f, normals) -> bool:
    poly = sp.Poly(f, *_X)
    if poly.total_degree() != 1:
        return False
    coeffs = [poly.coeff_monomial(x) for x in _X]
    v = _to_frac(coeffs)
    return any(linalg.is_parallel(v, n) for n in normals)


def _fixed_quadrics(mats, x):
    out = []
    for a in mats:
        out += linalg.cross(list(x), _sym_apply(a, x))
    return _nonzero(out)


def _solve_projective(polys):
    """Real solutions in P^2 of a zero-dimensional homogeneous system: (exact point or None, count)."""
    found = []
    charts = [((1, _X[1], _X[2]), (_X[1], _X[2])), ((0, 1, _X[2]), (_X[2],)), ((0, 0, 1), ())]
    for pt, unknowns in charts:
        sub = _nonzero([f.subs(dict(zip(_X, pt)), simultaneous=True) for f in polys])
        if not unknowns:
            if not sub:
                found.append(tuple(sp.Integer(c) for c in pt))
            continue
        if not sub:
            raise ValueError("positive-dimensional fixed locus")
        for sol in sp.solve(sub, list(unknowns), dict=True):
            if any(u not in sol for u in unknowns):
                raise ValueError("positive-dimensional fixed locus")
            vals = [sp.nsimplify(sol[u]) if sol[u].is_Rational else sol[u] for u in unknowns]
            if not all(v.is_real for v in vals):
                continue
            point = [sp.sympify(c) for c in pt]
            it = iter(vals)
            point = [next(it) if c in unknowns else c for c in point]
            found.append(tuple(point))
    return found


def _rational_points_on(f, normals, on, limit=40):
    """A few rational points of the curve f = 0 lying in the stratum."""
    poly = sp.Poly(f, *_X)
    out = []
    if poly.total_degree() == 1:
        coeffs = _to_frac([poly.coeff_monomial(x) for x in _X])
        for v in _small_vectors():
            if linalg.dot(coeffs, v) == 0 and _in_stratum(v, normals, on):
                out.append(v)
                if len(out) >= 3:
                    break
        return out
    grid = [Fraction(a, b) for b in (1, 2, 3) for a in range(-6, 7)]
    for a in grid:
        g = sp.Poly(f.subs({_X[0]: 1, _X[1]: sp.Rational(a.numerator, a.denominator)}), _X[2])
        if g.is_zero:
            continue
        for r in sp.roots(g, filter="Q"):
            v = linalg.normalize_projective((Fraction(1), a, Fraction(int(sp.numer(r)), int(sp.denom(r)))))
            if _in_stratum(v, normals, on) and v not in out:
                out.append(v)
        if len(out) >= limit // 10:
            break
    return out


def stratum_orbits(mats, stratum, normals) -> list:
    """Orbits of the connected isotropy group on one stratum of the fiber."""
    normals = [tuple(n) for n in normals]
    on = tuple(stratum.lines)
    if stratum.kind == "point":
        return [OrbitPiece("point", 0, tuple(stratum.representative), "intersection point")]
    if stratum.kind == "line":
        return _line_orbits(mats, stratum, normals, on)
    return _open_orbits(mats, normals)


def _line_orbits(mats, stratum, normals, on):
    n = on[0]
    b1, b2 = linalg.nullspace([list(n)])
    x = [b1[i] * _S + b2[i] * _T for i in range(3)]
    x = [sp.nsimplify(c) for c in x]
    quads = _fixed_quadrics(mats, x)
    line = "line %s" % _fmt_vec(n)
    if not quads:
        return [OrbitPiece("open", 1, tuple(stratum.representative), line, moduli=True)]
    pieces = []
    rep = next((v for v in _small_vectors() if _in_stratum(v, normals, on)
                and _orbit_dim(mats, v) == 1), None)
    pieces.append(OrbitPiece("open", 1, rep, line + " minus special points"))
    h = _gcd(quads)
    if h.free_symbols:
        for fac, _ in sp.factor_list(h)[1]:
            pf = sp.Poly(fac, _S, _T)
            if pf.total_degree() == 1:
                a, b = pf.coeff_monomial(_S), pf.coeff_monomial(_T)
                v = _to_frac([b * b1[i] - a * b2[i] for i in range(3)])
                v = linalg.normalize_projective(v)
                if _in_stratum(v, normals, on):
                    pieces.append(OrbitPiece("point", 0, v, "fixed point on " + line))
            else:
                nreal = _count_real_binary_roots(pf)
                if nreal:
                    pieces.append(OrbitPiece("point", 0, None, "irrational fixed points %s" % fac,
                                             count=nreal))
    return pieces


def _count_real_binary_roots(pf) -> int:
    expr = pf.as_expr().subs(_T, 1)
    count = len(sp.Poly(expr, _S).real_roots()) if sp.Poly(expr, _S).degree() > 0 else 0
    if pf.degree(_S) < pf.total_degree():
        count += 1
    return count


def _open_orbits(mats, normals):
    on = ()
    vecs = [_sym_apply(a, list(_X)) for a in mats]
    cubics = []
    for i in range(len(vecs)):
        for j in range(i + 1, len(vecs)):
            cubics.append(sp.Matrix([list(_X), vecs[i], vecs[j]]).det())
    cubics = _nonzero(cubics)
    rep = next((v for v in _small_vectors() if _in_stratum(v, normals, on)
                and _orbit_dim(mats, v) == 2), None)
    if not cubics:
        any_rep = next(v for v in _small_vectors() if _in_stratum(v, normals, on))
        return [OrbitPiece("open", 2, any_rep, "complement of the arrangement", moduli=True)]
    pieces = [OrbitPiece("open", 2, rep, "complement of the arrangement")]
    quads = _fixed_quadrics(mats, list(_X))
    fixed_curve = _gcd(quads) if quads else sp.Integer(0)
    g = _gcd(cubics)
    if g.free_symbols:
        for fac, _ in sp.factor_list(g)[1]:
            if _is_line_of(fac, normals):
                continue
            pts = _rational_points_on(fac, normals, on)
            if quads and sp.rem(fixed_curve, fac, *_X) == 0 and fixed_curve != 0:
                pieces.append(OrbitPiece("curve", 1, pts[0] if pts else None, "fixed curve %s" % fac,
                                         moduli=True))
                continue
            good = next((v for v in pts if _orbit_dim(mats, v) == 1), None)
            pieces.append(OrbitPiece("curve", 1, good, "invariant curve %s = 0" % fac))
    if quads:
        residual = quads
        if fixed_curve.free_symbols:
            residual = _nonzero([sp.quo(q, fixed_curve, *_X) for q in quads])
        for pt in _solve_projective(residual):
            if all(c.is_Rational for c in pt):
                v = linalg.normalize_projective(_to_frac(pt))
                if _in_stratum(v, normals, on):
                    pieces.append(OrbitPiece("point", 0, v, "fixed point"))
            elif not any(_exact_on_line(pt, n) for n in normals):
                pieces.append(OrbitPiece("point", 0, None, "irrational fixed point"))
    return pieces


def _exact_on_line(pt, n) -> bool:
    return sp.simplify(sum(sp.Rational(c.numerator, c.denominator) * x for c, x in zip(n, pt))) == 0


def _fmt_vec(v) -> str:
    return "(%s)" % ",".join(str(x) for x in v)


# --- staged witness search ----------------------------------------------

def _stage_block(p: TowerPoint, j: int) -> int:
    """Jet degree whose coefficients enter the level-j condition affinely.

    The image of the tautological field at level i needs one more jet order
    than at level i-1 when the step into level i is non-vertical, and the same
    order after a vertical step.  A vertical condition is traced down the
    fibers to the first level where the tangent has a non-vertical part.
    """
    orders = [1]
    for i in range(1, j):
        orders.append(orders[-1] + (1 if _non_vertical(p, i) else 0))
    d = p.direction(j)
    if _non_vertical(p, j):
        return orders[j - 1]
    i, t = j - 1, (d[1], d[2])
    while True:
        piv = p.steps[i - 1].pivot
        tt = [Fraction(0)] * 3
        a, b = others(piv)
        tt[a], tt[b] = t
        if tt[0] != 0 or i == 1:
            return orders[i - 1]
        t = (tt[1], tt[2])
        i -= 1


def _non_vertical(p: TowerPoint, j: int) -> bool:
    # there is no vertical plane at level 0
    return j == 1 or p.direction(j)[0] != 0


def _vertical_image(phi, p, q, i, t):
    """Image of the vertical tangent t at p_i, in q_i's vertical coordinates, up to scale."""
    piv = p.steps[i - 1].pivot
    a, b = others(piv)
    tt = [Fraction(0)] * 3
    tt[a], tt[b] = t
    if tt[0] != 0 or i == 1:
        img, w = image_direction(phi, project(p, i - 1), tt)
        if img != project(q, i - 1):
            return None
    else:
        sub = _vertical_image(phi, p, q, i - 1, (tt[1], tt[2]))
        if sub is None:
            return None
        w = [Fraction(0), sub[0], sub[1]]
    dq = q.direction(i)
    pq = q.steps[i - 1].pivot
    jq, lq = others(pq)
    return [w[jq] - dq[jq] * w[pq], w[lq] - dq[lq] * w[pq]]


def _stage_residual(phi, p, q, j):
    d, dq = p.direction(j), q.direction(j)
    if _non_vertical(p, j):
        if not _non_vertical(q, j):
            return [Fraction(1)]
        img, w = image_direction(phi, project(p, j - 1), d)
        if img != project(q, j - 1):
            return None
        return linalg.cross(w, dq)
    if dq[0] != 0:
        return [Fraction(1)]
    y = _vertical_image(phi, p, q, j - 1, (d[1], d[2]))
    if y is None:
        return None
    return [y[0] * dq[2] - y[1] * dq[1]]


def _random_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-4, 4), rng.choice((1, 1, 2, 3)))


def _block_monomials(b: int):
    return [(i, e) for e in _monomials(3, b) for i in range(3)]


class _JetBuilder:
    def __init__(self, p: TowerPoint, q: TowerPoint, degree: int):
        self.p, self.q, self.degree = p, q, degree
        self.values = {}

    def jet(self, override=None) -> MapJet:
        vals = dict(self.values)
        if override:
            vals.update(override)
        polys = [{(0, 0, 0): self.q.base[i]} for i in range(3)]
        for (i, e), c in vals.items():
            if c:
                polys[i][e] = polys[i].get(e, 0) + c
        return MapJet.from_terms(polys, self.degree, self.p.base)


class _AffineFamily:
    """Block coefficients ``c0 + N z`` satisfying the stages solved so far."""

    def __init__(self, mons, c0):
        self.mons = mons
        self.c0 = [c0[m] for m in mons]
        self.cols = [[Fraction(int(i == j)) for i in range(len(mons))] for j in range(len(mons))]

    def point(self, z) -> dict:
        c = list(self.c0)
        for zi, col in zip(z, self.cols):
            if zi:
                c = [x + zi * y for x, y in zip(c, col)]
        return dict(zip(self.mons, c))

    def fix(self, i, value):
        self.c0 = [x + value * y for x, y in zip(self.c0, self.cols[i])]
        del self.cols[i]

    def restrict(self, z0, null):
        base = self.point(z0)
        self.c0 = [base[m] for m in self.mons]
        self.cols = [[sum((v * col[r] for v, col in zip(nv, self.cols) if v), Fraction(0))
                      for r in range(len(self.mons))] for nv in null]


def _unit(m, i, scale=1):
    return [Fraction(scale) if k == i else Fraction(0) for k in range(m)]


def _interactions(f, m, r0, f1):
    """Coordinates with nonzero pure second differences, and interacting pairs."""
    selfish, edges = set(), set()
    for i in range(m):
        r2 = f(_unit(m, i, 2))
        if r2 is None:
            return None
        if any(a - 2 * b + c for a, b, c in zip(r2, f1[i], r0)):
            selfish.add(i)
    for i in range(m):
        for j in range(i + 1, m):
            if i in selfish or j in selfish:
                continue
            z = _unit(m, i)
            z[j] = Fraction(1)
            rij = f(z)
            if rij is None:
                return None
            if any(a - b - c + d for a, b, c, d in zip(rij, f1[i], f1[j], r0)):
                edges.add((i, j))
    return selfish, edges


def _solve_stage(fam: _AffineFamily, f_of_c, rng) -> bool:
    """Restrict ``fam`` to the zero set of one stage residual; False when stalled."""
    for _ in range(4):
        m = len(fam.cols)

        def f(z):
            return f_of_c(fam.point(z))

        r0 = f([Fraction(0)] * m)
        if r0 is None:
            return False
        if not any(r0) and m == 0:
            return True
        f1 = []
        for i in range(m):
            r = f(_unit(m, i))
            if r is None:
                return False
            f1.append(r)
        jac = [[f1[i][row] - r0[row] for i in range(m)] for row in range(len(r0))]
        probe = [_random_fraction(rng) for _ in range(m)]
        rp = f(probe)
        if rp is None:
            return False
        if rp == [a + b for a, b in zip(r0, linalg.matvec(jac, probe))] if m else rp == r0:
            if m == 0:
                return not any(r0)
            z0 = linalg.solve(jac, [-x for x in r0])
            if z0 is None:
                return False
            fam.restrict(z0, linalg.nullspace(jac))
            return True
        found = _interactions(f, m, r0, f1)
        if found is None:
            return False
        selfish, edges = found
        fixed = set(selfish)
        edges = {e for e in edges if e[0] not in fixed and e[1] not in fixed}
        while edges:
            deg = {}
            for a, b in edges:
                deg[a] = deg.get(a, 0) + 1
                deg[b] = deg.get(b, 0) + 1
            v = max(sorted(deg), key=lambda k: deg[k])
            fixed.add(v)
            edges = {e for e in edges if v not in e}
        if not fixed:
            return False
        for i in sorted(fixed, reverse=True):
            fam.fix(i, _random_fraction(rng))
    return False


def _solve_block(builder, block, stages, rng, p, q):
    mons = _block_monomials(block)
    c0 = {m: _random_fraction(rng) for m in mons}
    if block == 1:
        for i in range(3):
            c0[(i, tuple(int(k == i) for k in range(3)))] += rng.choice((1, 2, 3))
    if not stages:
        builder.values.update(c0)
        return True
    fam = _AffineFamily(mons, c0)
    for j in stages:
        def residual(c, j=j):
            try:
                return _stage_residual(builder.jet(c), p, q, j)
            except SempleError:
                return None
        if not _solve_stage(fam, residual, rng):
            return False
    sol = fam.point([_random_fraction(rng) for _ in fam.cols])
    for j in stages:
        try:
            r = _stage_residual(builder.jet(sol), p, q, j)
        except SempleError:
            return False
        if r is None or any(r):
            return False
    builder.values.update(sol)
    return True


def solve_for_jet(p: TowerPoint, q: TowerPoint, rng: random.Random, degree: int | None = None):
    """One attempt at an exact jet with ``Phi^k(p) = q``; None when the attempt stalls."""
    k = p.level
    degree = max(degree or k, 1)
    builder = _JetBuilder(p, q, degree)
    plan = {j: _stage_block(p, j) for j in range(1, k + 1)}
    for block in range(1, degree + 1):
        stages = [j for j in range(1, k + 1) if plan[j] == block]
        if not _solve_block(builder, block, stages, rng, p, q):
            return None
    phi = builder.jet()
    if phi.determinant() == 0:
        return None
    try:
        if prolong_diffeo(phi, p) != q:
            return None
    except SempleError:
        return None
    return phi


def find_witness(p: TowerPoint, q: TowerPoint, budget: int = 20, seed: int = 0,
                 degree: int | None = None):
    """Exact witness jet or None after ``budget`` randomized attempts."""
    p, q = canonical_chart(p), canonical_chart(q)
    rng = random.Random(seed)
    for _ in range(budget):
        phi = solve_for_jet(p, q, rng, degree)
        if phi is not None:
            return phi
    return None


def exp_field(basis, coeffs, degree: int, center=(0, 0, 0)) -> MapJet:
    """Time-one flow of a field jet with nilpotent linear part (finite Lie series)."""
    zero = MultiSeries(3, {}, degree)
    xs = [MultiSeries.var(3, i, degree) for i in range(3)]
    xi = [zero] * 3
    for (i, e), c in zip(basis, coeffs):
        if c:
            xi[i] = xi[i] + MultiSeries(3, {e: Fraction(c)}, degree)

    def lie(f):
        out = zero
        for j in range(3):
            out = out + xi[j] * f.deriv(j)
        return out.truncate(degree)

    comps = []
    for i in range(3):
        term, acc, n = xs[i], xs[i], 1
        while term.terms:
            if n > 4 * (degree + 3):
                raise ValueError("linear part of the field is not nilpotent")
            term = lie(term).scale(Fraction(1, n))
            acc = acc + term
            n += 1
        comps.append(acc + MultiSeries.constant(3, center[i], degree))
    return MapJet(comps, degree, center)


def _linear_index(basis):
    return [[basis.index((i, tuple(int(k == j) for k in range(3)))) for j in range(3)]
            for i in range(3)]


def _subalgebra(alg: IsotropyAlgebra, zero_entries) -> list:
    """Elements of the algebra whose linear part vanishes on ``zero_entries``."""
    if not alg.elements:
        return []
    idx = _linear_index(alg.basis)
    rows = [[kv[idx[i][j]] for kv in alg.elements] for i, j in zero_entries]
    if not rows:
        return list(alg.elements)
    combos = linalg.nullspace(rows)
    n = len(alg.basis)
    return [[sum((c * kv[b] for c, kv in zip(cv, alg.elements) if c), Fraction(0))
             for b in range(n)] for cv in combos]


_UPPER = [(i, j) for i in range(3) for j in range(3) if j <= i]
_LOWER = [(i, j) for i in range(3) for j in range(3) if j >= i]
_OFFDIAG = [(i, j) for i in range(3) for j in range(3) if i != j]


def _torus_weights(alg: IsotropyAlgebra) -> list:
    """Integer weight vectors w with ``sum w_i x_i d_i`` in the algebra."""
    idx = _linear_index(alg.basis)
    diag = _subalgebra(alg, _OFFDIAG)
    out = []
    for kv in diag:
        rest = [c for b, c in enumerate(kv) if b not in (idx[0][0], idx[1][1], idx[2][2])]
        if any(rest):
            continue
        w = [kv[idx[i][i]] for i in range(3)]
        den = reduce(lambda a, b: a * b // _igcd(a, b), [x.denominator for x in w], 1)
        out.append([int(x * den) for x in w])
    return out


def _igcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def isotropy_sample(p: TowerPoint, count: int, seed: int = 0, degree: int | None = None,
                    attempts: int = 10) -> list:
    """Identity plus seeded random jets fixing p, each re-verified exactly.

    Samples are products of flows of nilpotent elements of the isotropy
    algebra and diagonal scalings allowed by it.
    """
    degree = max(degree or p.level + 1, 1)
    p = canonical_chart(p)
    rng = random.Random(seed)
    out = [MapJet.identity(degree, p.base)] if count >= 1 else []
    if count <= 1:
        return out
    alg = isotropy_algebra(p, degree)
    upper = _subalgebra(alg, _UPPER)
    lower = _subalgebra(alg, _LOWER)
    torus = _torus_weights(alg)

    def flow(space):
        if not space:
            return None
        coeffs = [sum((_random_fraction(rng) * kv[b] for kv in space), Fraction(0))
                  for b in range(len(alg.basis))]
        return exp_field(alg.basis, coeffs, degree, p.base)

    misses = 0
    while len(out) < count and misses < attempts * count:
        factors = [flow(upper), flow(lower)]
        if torus:
            w = rng.choice(torus)
            lam = rng.choice([Fraction(2), Fraction(-1), Fraction(1, 2), Fraction(-3), Fraction(3, 2)])
            factors.append(jet_from_vector([], [], degree, p.base,
                                           linear=[[lam ** w[i] if i == j else 0 for j in range(3)]
                                                   for i in range(3)]))
        rng.shuffle(factors)
        phi = None
        for f in factors:
            if f is not None:
                phi = f if phi is None else phi @ f
        if phi is None or prolong_diffeo(phi, p) != p:
            misses += 1
            continue
        out.append(phi)
    for phi in out:
        if prolong_diffeo(phi, p) != p:
            raise ConstraintInconsistent("sample does not fix the point", p.level)
    return out


# --- fiber partitions ---------------------------------------------------

@dataclass
class FiberClass:
    label: str
    letter: str
    stratum: str
    piece: OrbitPiece
    witnesses: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"label": self.label, "letter": self.letter, "stratum": self.stratum,
                "piece": self.piece.to_json(), "witnesses": self.witnesses}


@dataclass
class FiberPartition:
    point: TowerPoint
    algebra_dimension: int
    classes: list

    def for_letter(self, label: str) -> list:
        return [c for c in self.classes if c.letter == label]

    def to_json(self) -> dict:
        return {"point": str(self.point), "isotropy_dimension": self.algebra_dimension,
                "classes": [c.to_json() for c in self.classes]}


def fiber_orbit_partition(p: TowerPoint, samples: Sequence[MapJet] = (),
                          arrangement: Arrangement | None = None,
                          algebra: IsotropyAlgebra | None = None) -> FiberPartition:
    """Orbit decomposition of the fiber over p, stratum by stratum.

    Samples are used as reachability witnesses: every sample must send each
    class representative into the same class, which is recorded.
    """
    arrangement = arrangement or arrangements_along(p)[-1]
    algebra = algebra or isotropy_algebra(p)
    normals = arrangement.lines()
    classes = []
    for st in fiber_strata(normals):
        letter = str(arrangement.letter(st.representative)) if p.level else "R"
        for n, piece in enumerate(stratum_orbits(algebra.fiber_matrices, st, normals)):
            label = "%s.%s%d" % (letter, piece.kind, n)
            classes.append(FiberClass(label, letter, "%s %s" % (st.kind, _fmt_vec(st.representative)),
                                      piece))
    for idx, phi in enumerate(samples):
        for cl in classes:
            d = cl.piece.representative
            if d is None:
                continue
            img, w = image_direction(phi, p, d)
            w = linalg.normalize_projective(w)
            if img != p:
                raise ConstraintInconsistent("sample does not fix the base point", p.level)
            same = (arrangement.letter(w) == arrangement.letter(d) if p.level else True) and \
                _orbit_dim(algebra.fiber_matrices, w) == _orbit_dim(algebra.fiber_matrices, d)
            if not same:
                raise ConstraintInconsistent("sample moved a direction across orbit classes", p.level)
            cl.witnesses.append({"sample": idx, "image": [str(x) for x in w]})
    return FiberPartition(p, algebra.dimension, classes)


# --- equivalence --------------------------------------------------------

@dataclass
class OrbitVerdict:
    verdict: str                         # "Equivalent", "Distinguished", "Unknown"
    witness: MapJet | None = None
    invariant: str | None = None
    values: tuple | None = None
    attempts: int = 0

    def to_json(self) -> dict:
        out = {"verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = jet_to_json(self.witness)
        if self.invariant is not None:
            out["invariant"] = self.invariant
            out["values"] = [_jsonable(v) for v in self.values]
        out["attempts"] = self.attempts
        return out


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, Fraction):
        return str(v)
    return v


def jet_to_json(phi: MapJet) -> dict:
    comps = []
    for c in phi.components:
        comps.append({"%d,%d,%d" % e[:3]: str(v) for e, v in sorted(c.terms.items())})
    return {"degree": phi.degree, "center": [str(x) for x in phi.center], "components": comps}


def orbit_labels(p: TowerPoint) -> list:
    """Per level: (letter, stratum dimension, piece kind, infinitesimal orbit dimension).

    Every entry is invariant under the prolonged action, so differing labels
    separate orbits.
    """
    arrs = arrangements_along(p)
    labels = []
    for j in range(1, p.level + 1):
        below = project(p, j - 1)
        arr = arrs[j - 1]
        d = p.direction(j)
        letter = str(arr.letter(d)) if j > 1 else "R"
        alg = isotropy_algebra(below)
        normals = arr.lines()
        through = [n for n in normals if linalg.dot(n, d) == 0]
        sdim = 2 - min(len(through), 2)
        odim = alg.orbit_dimension(d)
        kind = "open" if odim == sdim else ("fixed" if odim == 0 else "curve")
        labels.append((letter, sdim, kind, odim))
    return labels


def equivalent(p: TowerPoint, q: TowerPoint, budget: int = 20, seed: int = 0,
               degree: int | None = None) -> OrbitVerdict:
    if p.level != q.level:
        raise LevelMismatch("points at levels %d and %d" % (p.level, q.level))
    p, q = canonical_chart(p), canonical_chart(q)
    cp, cq = rvt_code_point(p), rvt_code_point(q)
    if cp != cq:
        return OrbitVerdict("Distinguished", invariant="rvt_code", values=(str(cp), str(cq)))
    if p == q:
        return OrbitVerdict("Equivalent", witness=MapJet.identity(max(p.level, 1), p.base))
    lp, lq = orbit_labels(p), orbit_labels(q)
    if lp != lq:
        return OrbitVerdict("Distinguished", invariant="fiber_orbit_labels", values=(lp, lq))
    rng = random.Random(seed)
    for attempt in range(1, budget + 1):
        phi = solve_for_jet(p, q, rng, degree)
        if phi is not None:
            return OrbitVerdict("Equivalent", witness=phi, attempts=attempt)
    return OrbitVerdict("Unknown", attempts=budget)


# --- orbit counts -------------------------------------------------------

_LETTER = re.compile(r"[RVTL]\d*")


def parse_word(text: str) -> list:
    labels = _LETTER.findall(text)
    if "".join(labels) != text or not labels:
        raise UnrealizableClass("not an RVT word: %r" % text)
    return labels


@dataclass
class OrbitRecord:
    representative: TowerPoint | None
    chain: list

    def to_json(self) -> dict:
        return {"representative": None if self.representative is None else str(self.representative),
                "chain": self.chain}


@dataclass
class OrbitCount:
    word: str
    lower: int
    upper: int | None
    orbits: list
    moduli_suspected: bool = False

    @property
    def exact(self) -> int | None:
        return self.lower if self.upper == self.lower else None

    def to_json(self) -> dict:
        return {"class": self.word, "lower": self.lower, "upper": self.upper,
                "moduli_suspected": self.moduli_suspected,
                "orbits": [o.to_json() for o in self.orbits]}


def orbit_count(word, budget: int = 20, seed: int = 0, check_realizable: bool = True) -> OrbitCount:
    """Orbits in an RVT class via the isotropy method, level by level."""
    text = str(word)
    labels = parse_word(text)
    if check_realizable and text not in enumerate_classes(len(labels)):
        raise UnrealizableClass("%s is not a realizable class" % text)
    if labels[0] != "R":
        raise UnrealizableClass("level-1 letters are always R")
    reps = [OrbitRecord(TowerPoint(), [])]
    unknown = False
    moduli = False
    for level, label in enumerate(labels, start=1):
        nxt = []
        for rec in reps:
            p = rec.representative
            arr = arrangements_along(p)[-1]
            algebra = isotropy_algebra(p)
            normals = arr.lines()
            for st in fiber_strata(normals):
                letter = str(arr.letter(st.representative)) if level > 1 else "R"
                if letter != label:
                    continue
                for piece in stratum_orbits(algebra.fiber_matrices, st, normals):
                    link = {"level": level, "letter": letter, "stratum": st.kind,
                            "isotropy_dimension": algebra.dimension,
                            "piece": piece.to_json(),
                            "certificate": _piece_certificate(piece, algebra)}
                    moduli = moduli or piece.moduli
                    if piece.representative is None or piece.moduli:
                        unknown = True
                        nxt.append(OrbitRecord(None, rec.chain + [link]))
                        continue
                    child = prolong_point(p, piece.representative)
                    for _ in range(piece.count):
                        nxt.append(OrbitRecord(child, rec.chain + [link]))
        resolved = [r for r in nxt if r.representative is not None]
        if level < len(labels):
            reps = resolved
        else:
            reps = nxt
    known = [r for r in reps if r.representative is not None]
    return OrbitCount(text, len(known), None if unknown else len(known), reps, moduli)


def _piece_certificate(piece: OrbitPiece, algebra: IsotropyAlgebra) -> str:
    if piece.moduli:
        return "isotropy orbits have dimension below the piece dimension everywhere"
    if piece.dimension == 0:
        return "single direction"
    return "infinitesimal orbit dimension %d equals the dimension of this irreducible invariant piece" \
        % piece.dimension

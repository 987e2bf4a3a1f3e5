"""Prolonged action of diffeomorphism jets on tower points.

``Phi^k(p_{k-1}, l) = (Phi^{k-1}(p_{k-1}), dPhi^{k-1}(l))``.  To push the line
``l`` we need the derivative of ``Phi^{k-1}`` along the frame vector spanning
it, so the point (or germ) one level down is thickened by an extra variable
``tau`` in that direction, pushed recursively, and differentiated in ``tau``.
Only first order in each ``tau`` is needed, so those variables carry an
exponent cap of 1; pushing a level-k point therefore works with series in k
nilpotent variables.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import InsufficientJetDegree, SingularLinearPart
from .jets import MapJet, MultiSeries
from .tower import (ChartStep, TowerPoint, frame_coords, frame_vector, others,
                    u_index)


def _series(x, like: MultiSeries) -> MultiSeries:
    if isinstance(x, MultiSeries):
        return x
    return MultiSeries.constant(like.nvars, x, caps=like.caps)


def push_chart(phi: MapJet, coords: Sequence[MultiSeries], pivots: Sequence[int],
               params: Sequence[MultiSeries] = ()):
    """Image of a parametrized chart family under the prolongation of ``phi``.

    Returns ``(image_coords, image_pivots, top_w)``; ``top_w`` holds the
    unnormalized frame coordinates of the image of the top line (None at level 0).
    Image pivots are chosen canonically from the values at parameter 0.
    """
    m = len(pivots)
    if m == 0:
        return phi.substitute(coords[:3], params), (), None
    like = coords[0]
    n = like.nvars
    k = u_index(m)
    lower = coords[:k]
    piv = pivots[-1]
    j, l = others(piv)
    a = [0, 0, 0]
    a[piv] = 1
    a[j] = coords[k]
    a[l] = coords[k + 1]
    xvec = frame_vector(a, lower, pivots[:-1])
    tcaps = (1,)
    thick = []
    tau = MultiSeries.var(n + 1, n, caps=like.caps + tcaps)
    for c, x in zip(lower, xvec):
        c1 = c.add_vars(1, tcaps)
        if isinstance(x, MultiSeries):
            c1 = c1 + tau * x.add_vars(1, tcaps)
        elif x:
            c1 = c1 + tau.scale(x)
        thick.append(c1)
    tparams = [p.add_vars(1, tcaps) for p in params]
    img, img_piv, _ = push_chart(phi, thick, pivots[:-1], tparams)
    vel = [c.linear_coeff_in_last() for c in img]
    base = [c.drop_last_var() for c in img]
    w = frame_coords(vel, img_piv)
    w = [_series(x, like) for x in w]
    for x in w:
        if x.order < 0:
            raise InsufficientJetDegree("jet degree %d too small for level %d" % (phi.degree, m))
    consts = [x.const() for x in w]
    newpiv = next((i for i, c in enumerate(consts) if c != 0), None)
    if newpiv is None:
        raise SingularLinearPart("prolonged map is degenerate on the distribution")
    jj, ll = others(newpiv)
    u = w[jj] / w[newpiv]
    v = w[ll] / w[newpiv]
    return base + [u, v], tuple(img_piv) + (newpiv,), w


def _constant_chart(p: TowerPoint, nvars: int = 0, caps=None):
    return [MultiSeries.constant(nvars, c, caps=caps) for c in p.coords()]


def _check_degree(phi: MapJet, level: int):
    if phi.degree < level:
        raise InsufficientJetDegree("acting on level %d needs a jet of degree >= %d" % (level, level))


def prolong_diffeo(phi: MapJet, p: TowerPoint) -> TowerPoint:
    """``Phi^k(p)`` in the canonical chart of the image."""
    _check_degree(phi, p.level)
    if phi.nparams == 0 and phi.determinant() == 0:
        raise SingularLinearPart("linear part is singular")
    coords, pivots, _ = push_chart(phi, _constant_chart(p), p.pivots)
    for c in coords:
        if c.order < 0:
            raise InsufficientJetDegree("jet degree too small")
    base = [c.const() for c in coords[:3]]
    steps = [ChartStep(piv, coords[u_index(i)].const(), coords[u_index(i) + 1].const())
             for i, piv in enumerate(pivots, start=1)]
    return TowerPoint(base, steps)


def image_direction(phi: MapJet, p: TowerPoint, d: Sequence) -> tuple:
    """``(Phi^k(p), w)`` with ``w`` the frame coordinates of ``dPhi^k(d)`` (unnormalized, for d with pivot 1)."""
    from .tower import prolong_point
    q = prolong_point(p, d)
    coords, pivots, w = push_chart(phi, _constant_chart(q), q.pivots)
    img = TowerPoint([c.const() for c in coords[:3]],
                     [ChartStep(piv, coords[u_index(i)].const(), coords[u_index(i) + 1].const())
                      for i, piv in enumerate(pivots[:-1], start=1)])
    return img, [x.const() for x in w]


def canonical_chart(p: TowerPoint) -> TowerPoint:
    """Re-express p in the canonical chart (the deterministic chart transition)."""
    return prolong_diffeo(MapJet.identity(max(p.level, 1), p.base), p)


# --- infinitesimal action ----------------------------------------------

def field_basis(degree: int):
    """Monomial vector fields ``x^a d_i`` with ``1 <= |a| <= degree`` (vanishing at the base)."""
    from .jets import monomials_upto
    return [(i, e) for e in monomials_upto(3, degree, start=1) for i in range(3)]


def _epsilon_family(field_terms: dict, degree: int, center) -> MapJet:
    """``id + eps * xi`` as a one-parameter jet; ``field_terms`` maps (i, exponent) -> coeff."""
    comps = []
    for i in range(3):
        terms = {(0, 0, 0, 0): center[i], tuple(int(k == i) for k in range(3)) + (0,): 1}
        for (ci, e), c in field_terms.items():
            if ci == i:
                key = tuple(e) + (1,)
                terms[key] = terms.get(key, 0) + c
        comps.append(MultiSeries(4, terms, degree + 1, caps=(None, None, None, 1)))
    return MapJet(comps, degree + 1, center, nparams=1)


def prolonged_field(field_terms: dict, p: TowerPoint, degree: int) -> list:
    """Chart components of the prolonged vector field at p."""
    fam = _epsilon_family(field_terms, degree, p.base)
    caps = (1,)
    eps = MultiSeries.var(1, 0, caps=caps)
    coords, pivots, _ = push_chart(fam, _constant_chart(p, 1, caps), p.pivots, [eps])
    if tuple(pivots) != p.pivots:
        raise RuntimeError("infinitesimal image left the chart")
    return [c.coeff((1,)) for c in coords]


def infinitesimal_action(field_terms: dict, p: TowerPoint, degree: int) -> tuple:
    """Prolonged field at p and the 3x3 matrix A with ``dPhi_eps^k = I + eps A`` on the distribution.

    A is taken in frame coordinates; for fields whose prolongation vanishes at p
    it is the induced infinitesimal action on the fiber over p.
    """
    from .tower import prolong_point
    fam = _epsilon_family(field_terms, degree, p.base)
    caps = (1,)
    eps = MultiSeries.var(1, 0, caps=caps)
    cols, values = [], None
    for a in range(3):
        d = [int(a == b) for b in range(3)]
        q = prolong_point(p, d)
        coords, _, w = push_chart(fam, _constant_chart(q, 1, caps), q.pivots, [eps])
        if values is None:
            values = [c.coeff((1,)) for c in coords[:-2]]
        cols.append([x.coeff((1,)) for x in w])
    return values, [[cols[j][i] for j in range(3)] for i in range(3)]


def jet_from_vector(basis, coeffs, degree: int, center=(0, 0, 0), linear=None) -> MapJet:
    """Map jet ``x + sum coeffs * basis`` (plus an optional linear part override)."""
    polys = [dict() for _ in range(3)]
    for i in range(3):
        polys[i][(0, 0, 0)] = Fraction(center[i])
        polys[i][tuple(int(k == i) for k in range(3))] = Fraction(1)
    if linear is not None:
        for i in range(3):
            for j in range(3):
                polys[i][tuple(int(k == j) for k in range(3))] = Fraction(linear[i][j])
    for (i, e), c in zip(basis, coeffs):
        if c:
            polys[i][e] = polys[i].get(e, 0) + c
    return MapJet.from_terms(polys, degree, center)

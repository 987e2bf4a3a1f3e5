from fractions import Fraction

import pytest
from hypothesis import strategies as st

from semple.jets import MapJet, MultiSeries, TruncSeries, monomials_upto

# Realizing curves paired with their level and expected code.
TABLE_CURVES = [
    ("t, 0, 0", 1, "R"),
    ("t, 0, 0", 2, "RR"),
    ("t^2, t^3, 0", 2, "RV"),
    ("t, 0, 0", 3, "RRR"),
    ("t^2, t^5, 0", 3, "RRV"),
    ("t^2, t^3, 0", 3, "RVR"),
    ("t^3, t^5, t^7", 3, "RVV"),
    ("t^3, t^5, 0", 3, "RVV"),
    ("t^3, t^4, t^5", 3, "RVT"),
    ("t^3, t^4, 0", 3, "RVT"),
    ("t^4, t^6, t^7", 3, "RVL"),
]

small_fracs = st.builds(Fraction, st.integers(-4, 4), st.sampled_from([1, 1, 2, 3]))
nonzero_fracs = small_fracs.filter(lambda x: x != 0)


@st.composite
def trunc_series(draw, order=6, unit=False, vanishing=False):
    coeffs = draw(st.lists(small_fracs, min_size=order + 1, max_size=order + 1))
    if vanishing:
        coeffs[0] = Fraction(0)
    if unit and coeffs[0] == 0:
        coeffs[0] = draw(nonzero_fracs)
    return TruncSeries(coeffs, order)


@st.composite
def multi_series(draw, nvars=3, order=4):
    terms = {}
    for e in monomials_upto(nvars, order):
        if draw(st.booleans()):
            terms[e] = draw(small_fracs)
    return MultiSeries(nvars, terms, order)


@st.composite
def diffeo_jets(draw, degree=3, center=(0, 0, 0), target=None, density=0.5):
    """Random jet with invertible linear part, centered at ``center`` and landing on ``target``."""
    target = center if target is None else target
    lin = draw(st.sampled_from(_UNIMODULAR)) if draw(st.booleans()) else None
    polys = []
    for i in range(3):
        p = {(0, 0, 0): Fraction(target[i])}
        for e in monomials_upto(3, degree, start=1):
            if sum(e) == 1 and lin is not None:
                continue
            if draw(st.integers(0, 99)) < density * 100:
                p[e] = draw(small_fracs)
        if lin is not None:
            for j in range(3):
                p[tuple(int(k == j) for k in range(3))] = Fraction(lin[i][j])
        polys.append(p)
    phi = MapJet.from_terms(polys, degree, center)
    if phi.determinant() == 0:
        polys = [dict(p) for p in polys]
        for i in range(3):
            e = tuple(int(k == i) for k in range(3))
            polys[i][e] = polys[i].get(e, 0) + 7
        phi = MapJet.from_terms(polys, degree, center)
    if phi.determinant() == 0:
        phi = MapJet.identity(degree, center)
        phi = MapJet.from_terms([{**{e: c for e, c in comp.terms.items()}, (0, 0, 0): Fraction(target[i])}
                                 for i, comp in enumerate(phi.components)], degree, center)
    return phi


_UNIMODULAR = [
    [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    [[0, 1, 0], [1, 0, 0], [0, 0, 1]],
    [[1, 2, 0], [0, 1, -1], [0, 0, 1]],
    [[2, 0, 1], [1, 1, 0], [0, 3, 1]],
    [[0, 0, 1], [1, 0, 0], [0, 1, 0]],
    [[-1, 0, 0], [0, 2, 0], [0, 0, Fraction(1, 2)]],
]


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line("criterion %s: %s  %s" % (key, "PASS" if ok else "FAIL", detail))


@pytest.fixture
def record_criterion():
    def record(key, ok, detail=""):
        ACCEPTANCE[key] = (bool(ok), detail)
        return ok
    return record

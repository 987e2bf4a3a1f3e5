from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from conftest import diffeo_jets, multi_series, trunc_series
from semple.errors import BasePointMismatch, NonzeroConstantTerm, SingularLinearPart
from semple.jets import MapJet, MultiSeries, TruncSeries

T = sp.Symbol("t")
X = sp.symbols("x y z")
N = 200
ORACLE_N = 50


def to_sympy(s: TruncSeries):
    return sum(sp.Rational(c.numerator, c.denominator) * T ** k for k, c in enumerate(s.coeffs))


def sympy_coeffs(expr, order):
    poly = sp.Poly(sp.expand(expr), T) if expr != 0 else None
    out = [Fraction(0)] * (order + 1)
    if poly is None:
        return out
    for (k,), c in poly.terms():
        if k <= order:
            out[k] = Fraction(int(c.p), int(c.q))
    return out


def multi_to_sympy(m: MultiSeries):
    return sum(sp.Rational(c.numerator, c.denominator) * sp.Mul(*[v ** k for v, k in zip(X, e)])
               for e, c in m.terms.items())


def truncate_sympy(expr, order):
    poly = sp.Poly(sp.expand(expr), *X)
    return sp.Add(*[c * sp.Mul(*[v ** k for v, k in zip(X, e)])
                    for e, c in poly.terms() if sum(e) <= order])


# --- truncated series ---------------------------------------------------------

@settings(max_examples=N, deadline=None)
@given(trunc_series(), trunc_series(), trunc_series())
def test_series_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a - a == TruncSeries.zero(a.order)
    assert a * TruncSeries([1], a.order) == a


@settings(max_examples=ORACLE_N, deadline=None)
@given(trunc_series(), trunc_series())
def test_series_product_matches_sympy(a, b):
    expected = sympy_coeffs(to_sympy(a) * to_sympy(b), a.order)
    assert list((a * b).coeffs) == expected


@settings(max_examples=ORACLE_N, deadline=None)
@given(trunc_series(unit=True), trunc_series())
def test_series_division_matches_sympy(a, b):
    q = b / a
    expected = sp.series(to_sympy(b) / to_sympy(a), T, 0, a.order + 1).removeO()
    assert list(q.coeffs) == sympy_coeffs(expected, a.order)
    assert q * a == b


@settings(max_examples=N, deadline=None)
@given(trunc_series(), trunc_series(vanishing=True), trunc_series(vanishing=True))
def test_series_composition(a, b, c):
    expected = sympy_coeffs(to_sympy(a).subs(T, to_sympy(b)), a.order)
    assert list(a.compose(b).coeffs) == expected
    assert a.compose(b).compose(c) == a.compose(b.compose(c))


def test_division_by_vanishing_series_loses_orders():
    t = TruncSeries.monomial(1, 6)
    q = TruncSeries([0, 0, 1, 1], 6) / (t * t)
    assert q.order == 4
    assert q.coeffs[:2] == (1, 1)


def test_compose_rejects_constant_inner():
    with pytest.raises(NonzeroConstantTerm):
        TruncSeries([1, 1], 3).compose(TruncSeries([1, 1], 3))


# --- multivariate series ------------------------------------------------------

@settings(max_examples=N, deadline=None)
@given(multi_series(), multi_series(), multi_series())
def test_multiseries_ring_laws(a, b, c):
    # both sides may be known to different orders; compare on the common range
    assert ((a * b) * c).equal_to(a * (b * c))
    assert (a * (b + c)).equal_to(a * b + a * c)
    assert a * b == b * a


@settings(max_examples=ORACLE_N, deadline=None)
@given(multi_series(), multi_series())
def test_multiseries_product_matches_sympy(a, b):
    ours = multi_to_sympy((a * b).truncate(4))
    expected = truncate_sympy(multi_to_sympy(a) * multi_to_sympy(b), 4)
    assert sp.expand(ours - expected) == 0


@settings(max_examples=ORACLE_N, deadline=None)
@given(multi_series(), st.integers(0, 2))
def test_multiseries_derivative(a, i):
    assert sp.expand(multi_to_sympy(a.deriv(i)) - truncate_sympy(sp.diff(multi_to_sympy(a), X[i]), 3)) == 0


def test_caps_kill_higher_powers():
    eps = MultiSeries.var(1, 0, caps=(1,))
    assert (eps * eps).terms == {}


# --- map jets -----------------------------------------------------------------

@settings(max_examples=N, deadline=None)
@given(diffeo_jets(), diffeo_jets(), diffeo_jets())
def test_jet_group_laws(f, g, h):
    ident = MapJet.identity(3)
    assert (f @ g) @ h == f @ (g @ h)
    assert f @ ident == f and ident @ f == f
    finv = f.invert()
    assert f @ finv == ident
    assert finv @ f == ident


@settings(max_examples=ORACLE_N, deadline=None)
@given(diffeo_jets(), diffeo_jets())
def test_jet_composition_matches_sympy(f, g):
    fs = [multi_to_sympy(c) for c in f.components]
    gs = [multi_to_sympy(c) for c in g.components]
    for ours, comp in zip((f @ g).components, fs):
        composed = comp.subs(dict(zip(X, gs)), simultaneous=True)
        assert sp.expand(multi_to_sympy(ours) - truncate_sympy(composed, 3)) == 0


@settings(max_examples=N, deadline=None)
@given(diffeo_jets(center=(1, -2, 0), target=(3, 0, 1)))
def test_inverse_with_moved_center(f):
    g = f.invert()
    assert g.center == (3, 0, 1) and g.image_of_center == (1, -2, 0)
    assert f @ g == MapJet.identity(3, (3, 0, 1))


def test_singular_jet_cannot_be_inverted():
    phi = MapJet.linear([[1, 0, 0], [0, 0, 0], [0, 0, 1]], 2)
    with pytest.raises(SingularLinearPart):
        phi.invert()


def test_composition_checks_base_points():
    f = MapJet.identity(2, (1, 0, 0))
    g = MapJet.identity(2)
    with pytest.raises(BasePointMismatch):
        f @ g

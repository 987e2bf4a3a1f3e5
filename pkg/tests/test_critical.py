from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import TABLE_CURVES, diffeo_jets
from semple.critical import (arrangements_along, class_tree, enumerate_classes, fiber_strata,
                             rvt_code, rvt_code_point, vertical_plane)
from semple.curves import parse_curve
from semple.errors import NoVerticalAtLevelZero
from semple.jets import TruncSeries
from semple.prolong import prolong_diffeo
from semple.tower import ChartStep, TowerPoint, others, prolong_curve, step_from_direction

LEVEL4_NAMED = ["RRVT", "RVRV", "RVVR", "RVVV", "RVVT", "RVTR", "RVTV", "RVTL", "RVTT"]

# curves reaching a spread of level-4 classes
LEVEL4_CURVES = [
    "t, 0, 0", "t^2, t^3, 0", "t^3, t^4, t^5", "t^4, t^5, t^7", "t^4, t^5, 0",
    "t^4, t^6 + t^7, t^9", "t^4, t^6, t^9", "t^3, t^5, t^7", "t^4, t^6, t^7", "t^2, t^7, 0",
    "t^5, t^6, t^7", "t^3, t^7, t^8",
]


@pytest.mark.parametrize("text,k,word", TABLE_CURVES)
def test_table_codes(text, k, word):
    c = parse_curve(text)
    assert str(rvt_code(c, k)) == word
    assert str(rvt_code_point(prolong_curve(c, k).point)) == word


def test_longer_codes():
    assert str(rvt_code(parse_curve("t, 0, 0"), 4)) == "RRRR"
    assert str(rvt_code(parse_curve("t^4, t^5, t^7"), 4)) == "RVTT"


def test_censuses():
    assert enumerate_classes(1) == ["R"]
    assert enumerate_classes(2) == ["RR", "RV"]
    assert enumerate_classes(3) == ["RRR", "RRV", "RVL", "RVR", "RVT", "RVV"]
    level4 = [str(w) for w in enumerate_classes(4)]
    assert len(level4) == 23
    assert set(LEVEL4_NAMED) <= set(level4)


def test_class_tree_is_prefix_closed():
    for k in (2, 3, 4):
        below = {str(w) for w in enumerate_classes(k - 1)}
        for w in enumerate_classes(k):
            assert str(w)[0] == "R"
            assert str(w.prefix(k - 1)) in below


def test_tangency_only_after_critical_letters():
    tree = class_tree(4)
    for k in range(1, 4):
        for node in tree[k]:
            arr = arrangements_along(node.point)[-1]
            last = node.word.letters[-1].symbol
            if last == "R":
                assert len(arr.planes) == 1


def test_vertical_plane():
    with pytest.raises(NoVerticalAtLevelZero):
        vertical_plane(TowerPoint())
    for pivot in range(3):
        p = TowerPoint((0, 0, 0), [ChartStep(pivot, Fraction(1, 2), -1)])
        assert vertical_plane(p).normal == (1, 0, 0)


def test_rv_arrangement_has_four_letters():
    p = prolong_curve(parse_curve("t^2, t^3, 0"), 2).point
    arr = arrangements_along(p)[-1]
    letters = sorted(str(arr.letter(s.representative)) for s in fiber_strata(arr.lines()))
    assert letters == ["L", "R", "T", "V"]


@pytest.mark.parametrize("text", LEVEL4_CURVES)
def test_arrangements_stable_in_germ_order(text):
    p = prolong_curve(parse_curve(text), 4).point
    low = [a.lines() for a in arrangements_along(p, germ_order=6)]
    high = [a.lines() for a in arrangements_along(p, germ_order=12)]
    assert low == high


def _lift_fiber_curve(u1, v1, k):
    """Lift of a curve lying in the level-1 fiber over the origin (x = y = z = 0)."""
    steps = [ChartStep(0, u1[0], v1[0])]
    w = [TruncSeries.zero(u1.order - 1), u1.derive(), v1.derive()]
    for _ in range(2, k + 1):
        m = min(s.valuation() for s in w if s.valuation() is not None)
        st_ = step_from_direction([s[m] for s in w])
        j, l = others(st_.pivot)
        u, v = w[j] / w[st_.pivot], w[l] / w[st_.pivot]
        steps.append(ChartStep(st_.pivot, u[0], v[0]))
        w = [w[st_.pivot], u.derive(), v.derive()]
    return TowerPoint((0, 0, 0), steps)


@settings(max_examples=60, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))
def test_tangency_planes_contain_lifts_of_fiber_curves(a, b, c):
    # prolongations of curves inside a fiber stay tangent to the prolonged fiber,
    # so from level 3 on their directions lie in a tangency plane
    n = 20
    u1 = TruncSeries([0, 1, a] + [0] * (n - 2), n)
    v1 = TruncSeries([0, 0, b, c] + [0] * (n - 3), n)
    p = _lift_fiber_curve(u1, v1, 4)
    word = rvt_code_point(p)
    assert str(word)[:2] == "RV"
    for letter in word.letters[2:]:
        assert letter.symbol in ("T", "L")


_POINTS = [prolong_curve(parse_curve(t), k).point for t, k, _ in TABLE_CURVES] + \
    [prolong_curve(parse_curve(t), 4).point for t in LEVEL4_CURVES]


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(_POINTS), diffeo_jets(degree=5))
def test_code_invariant_under_diffeomorphisms(p, phi):
    assert rvt_code_point(prolong_diffeo(phi, p)) == rvt_code_point(p)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(LEVEL4_CURVES), diffeo_jets(degree=5))
def test_curve_code_invariant_under_diffeomorphisms(text, phi):
    c = parse_curve(text)
    assert rvt_code(phi.apply_curve(c), 4) == rvt_code(c, 4)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(LEVEL4_CURVES), st.integers(1, 3), st.integers(-3, 3), st.integers(-3, 3))
def test_code_invariant_under_reparametrization(text, a, b, c):
    curve = parse_curve(text)
    phi = TruncSeries([0, a, b, c], curve.order)
    assert rvt_code(curve.reparametrize(phi), 4) == rvt_code(curve, 4)

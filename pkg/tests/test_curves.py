from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import TABLE_CURVES, small_fracs
from semple.curves import format_curve, parse_curve, parse_terms
from semple.errors import OrderOverflow, ParseError


def comps(c):
    return [{k: s[k] for k in range(s.order + 1) if s[k]} for s in c.series]


def test_literal_reading():
    assert comps(parse_curve("2t, t^2/3, 0")) == [{1: 2}, {2: Fraction(1, 3)}, {}]
    assert comps(parse_curve("t,0,0")) == [{1: 1}, {}, {}]
    assert comps(parse_curve("t^3,t^4,t^5")) == [{3: 1}, {4: 1}, {5: 1}]


def test_coefficient_forms():
    got = parse_terms("3/4*t - 0.25t^2 + 1.5, -t^3 + t^3, 5*t")
    assert got == [{0: Fraction(3, 2), 1: Fraction(3, 4), 2: Fraction(-1, 4)}, {}, {1: 5}]


@pytest.mark.parametrize("text,pos", [
    ("t,0", 3),
    ("t^0,0,0", 2),
    ("t,,0", 2),
    ("t,0,0x", 5),
    ("2*,0,0", 2),
    ("t/0,0,0", 2),
    ("t^,0,0", 2),
    ("x,0,0", 0),
])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as exc:
        parse_curve(text)
    assert exc.value.position == pos


def test_order_overflow():
    with pytest.raises(OrderOverflow):
        parse_curve("t^9, 0, 0", order=8)
    assert parse_curve("t^9, 0, 0", order=9).order == 9


@pytest.mark.parametrize("text", sorted({c for c, _, _ in TABLE_CURVES}))
def test_round_trip_table_curves(text):
    c = parse_curve(text)
    assert format_curve(c) == text
    assert parse_curve(format_curve(c)) == c


@st.composite
def term_dicts(draw):
    return [{k: c for k, c in draw(st.dictionaries(st.integers(0, 12), small_fracs, max_size=4)).items() if c}
            for _ in range(3)]


@settings(max_examples=200, deadline=None)
@given(term_dicts())
def test_print_parse_round_trip(terms):
    text = format_curve(terms)
    assert parse_terms(text) == terms
    assert format_curve(parse_terms(text)) == text

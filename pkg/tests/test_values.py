from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from finmetric.values import INF, ZERO, BadValue, abs_diff, format_value, to_value

finite = st.fractions(min_value=0, max_denominator=12).map(lambda f: f if f <= 100 else Fraction(100))
ext = st.one_of(finite, st.just(INF))


@pytest.mark.parametrize(
    "raw, expected",
    [("3/4", Fraction(3, 4)), ("2", Fraction(2)), ("6/8", Fraction(3, 4)), (5, Fraction(5)), ("inf", INF), (INF, INF)],
)
def test_parse_literals(raw, expected):
    assert to_value(raw) == expected


@pytest.mark.parametrize("raw", ["1/0", "-1", "-1/2", "1.5", "", "1/", "abc", 1.5, True, None, "1/2/3"])
def test_reject_bad_literals(raw):
    with pytest.raises(BadValue):
        to_value(raw)


def test_format_is_reduced():
    assert format_value(Fraction(6, 8)) == "3/4"
    assert format_value(Fraction(4, 2)) == "2"
    assert format_value(ZERO) == "0"
    assert format_value(INF) == "inf"


@given(ext)
def test_format_roundtrip(v):
    assert to_value(format_value(v)) == v


@given(ext, ext)
def test_addition_absorbs_infinity(a, b):
    s = a + b
    if INF in (a, b):
        assert s is INF
    else:
        assert s == Fraction(a) + Fraction(b)
    assert a + b == b + a


@given(finite)
def test_infinity_is_maximal(v):
    assert v < INF and INF > v and not INF < v
    assert max(v, INF) is INF and min(v, INF) == v
    assert INF >= INF and INF <= INF


@given(ext, ext, ext)
def test_order_is_total_and_transitive(a, b, c):
    assert (a <= b) or (b <= a)
    if a <= b and b <= c:
        assert a <= c


def test_abs_diff_conventions():
    assert abs_diff(INF, INF) == 0
    assert abs_diff(INF, Fraction(3)) is INF
    assert abs_diff(Fraction(1), Fraction(3)) == 2


def test_sum_and_sort_on_mixed_values():
    vals = [Fraction(2), INF, Fraction(1, 2)]
    assert sorted(vals) == [Fraction(1, 2), Fraction(2), INF]
    assert sum(vals, ZERO) is INF

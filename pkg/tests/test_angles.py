import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bellhda.angles import ChshSettings, chsh_pairs, wrap_diff, wrap_report
from bellhda.errors import InvalidArgumentError

PI = math.pi
reals = st.floats(min_value=-1e4, max_value=1e4, allow_nan=False)


@pytest.mark.parametrize("x, expected", [(0.0, 0.0), (PI / 2, 0.0), (3 * PI / 8, -PI / 8)])
def test_wrap_diff_examples(x, expected):
    assert wrap_diff(x) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("x, expected", [(PI / 8, PI / 8), (PI / 2, -PI / 4), (-PI / 2, PI / 4)])
def test_wrap_report_examples(x, expected):
    assert wrap_report(x) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("fn", [wrap_diff, wrap_report])
@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_rejected(fn, bad):
    with pytest.raises(InvalidArgumentError):
        fn(bad)


@given(reals)
def test_wrap_diff_range_and_period(x):
    w = wrap_diff(x)
    assert -PI / 4 <= w < PI / 4
    k = (w - x) / (PI / 2)
    assert abs(k - round(k)) * (PI / 2) < 1e-12 * max(1.0, abs(x))
    d = abs(wrap_diff(x + PI / 2) - w)
    assert min(d, abs(d - PI / 2)) < 1e-12 * max(1.0, abs(x))


@given(reals, st.integers(min_value=-50, max_value=50))
def test_wrap_report_period(x, k):
    w = wrap_report(x)
    assert -PI / 4 <= w < PI / 2
    shifted = wrap_report(x + 3 * k * PI / 4)
    # both sides of the interval boundary represent the same class
    d = abs(shifted - w)
    assert min(d, abs(d - 3 * PI / 4)) < 1e-12 * max(1.0, abs(x) + abs(k) * 3)


def test_tiny_negative_stays_in_range():
    assert -PI / 4 <= wrap_diff(-PI / 4 - 1e-18) < PI / 4
    assert wrap_diff(-1e-300) <= 0


def test_default_settings_and_pairs():
    s = ChshSettings()
    assert (s.a0, s.a1, s.b0, s.b1) == (0.0, PI / 4, PI / 8, 3 * PI / 8)
    assert chsh_pairs(s) == [(0.0, PI / 8), (0.0, 3 * PI / 8), (PI / 4, PI / 8), (PI / 4, 3 * PI / 8)]
    assert chsh_pairs(s) == chsh_pairs(s)


def test_degenerate_settings_duplicate_pairs():
    pairs = chsh_pairs(ChshSettings(a0=0.0, a1=0.0))
    assert pairs[0] == pairs[2] and pairs[1] == pairs[3]
    assert len({p.b for p in pairs}) == 2

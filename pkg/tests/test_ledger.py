import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bellhda.detection import conditional_E
from bellhda.errors import EmptyCountsError, InsufficientDwellError, InvalidArgumentError
from bellhda.ledger import (
    METRICS_COLUMNS,
    AbsentCounterfactualWarning,
    CoincidenceCounts,
    PairLedger,
    PairMeans,
    delta,
    expectation_from_counts,
    metrics_from_ledger,
    pair_means,
    s8,
    s_chsh,
)

R2 = math.sqrt(2) / 2
counts = st.integers(min_value=0, max_value=10**6)
means = st.floats(min_value=-1, max_value=1, allow_nan=False)


def means_of(f, c):
    f, c = np.asarray(f, float), np.asarray(c, float)
    return PairMeans(f, c, tuple(bool(x) for x in np.isnan(c)))


def test_expectation_examples():
    assert expectation_from_counts(CoincidenceCounts(17, 0, 0, 0)) == 1.0
    assert expectation_from_counts(CoincidenceCounts(1, 1, 1, 1)) == 0.0
    assert expectation_from_counts(CoincidenceCounts(500000, 146447, 146447, 207106)) == pytest.approx(0.414212, abs=1e-12)


def test_empty_counts_is_an_error():
    with pytest.raises(EmptyCountsError):
        expectation_from_counts(CoincidenceCounts())


@given(counts, counts, counts, counts)
def test_expectation_in_range(a, b, c, d):
    if a + b + c + d:
        assert -1 <= expectation_from_counts(CoincidenceCounts(a, b, c, d)) <= 1


def full_ledger(f=(1, 1, 1, 1), c=(1, 1, 1, 1)):
    led = PairLedger()
    for k in range(4):
        led.accumulate(k, True, f[k], 1.0)
        led.accumulate(k, False, c[k], 3.0)
    return led


def test_accumulate_weighted_means():
    led = full_ledger()
    led.accumulate(0, True, 1.0, 1.0)
    assert pair_means(led).factual[0] == 1.0
    led = full_ledger()
    led.factual_sum[1] = led.factual_weight[1] = 0
    led.accumulate(1, True, 1.0, 1.0)
    led.accumulate(1, True, -1.0, 3.0)
    assert pair_means(led).factual[1] == -0.5


def test_channels_are_independent():
    led = PairLedger()
    for k in range(4):
        led.accumulate(k, True, 0.5, 2.0)
        led.accumulate(k, False, -0.25, 1.0)
        led.accumulate(k, True, 0.5, 2.0)
    m = pair_means(led)
    assert np.all(m.factual == 0.5) and np.all(m.counterfactual == -0.25)
    assert np.all(led.factual_weight == 4.0) and np.all(led.cf_weight == 1.0)


@pytest.mark.parametrize("weight", [0.0, -1.0])
def test_accumulate_rejects_bad_weight(weight):
    with pytest.raises(InvalidArgumentError):
        PairLedger().accumulate(0, True, 0.5, weight)


def test_insufficient_dwell_names_pair():
    led = full_ledger()
    led.factual_weight[2] = 0
    with pytest.raises(InsufficientDwellError) as info:
        pair_means(led)
    assert info.value.pair_index == 2


def test_absent_counterfactual_is_flagged():
    led = PairLedger()
    for k in range(4):
        led.accumulate(k, True, 0.5, 1.0)
    m = pair_means(led)
    assert all(m.cf_absent) and np.all(np.isnan(m.counterfactual))
    with pytest.warns(AbsentCounterfactualWarning):
        assert delta(m) == 0.0


def test_counts_accumulate_into_means():
    led = PairLedger()
    for k in range(4):
        led.accumulate_counts(k, True, CoincidenceCounts(3, 1, 0, 0))
        led.accumulate_counts(k, False, CoincidenceCounts(0, 0, 1, 1))
    m = pair_means(led)
    assert np.all(m.factual == 0.5) and np.all(m.counterfactual == 0.0)
    assert led.factual_counts[0] == CoincidenceCounts(3, 1, 0, 0)


def test_s_chsh_examples():
    assert s_chsh((R2, -R2, R2, R2)) == pytest.approx(2 * math.sqrt(2), abs=1e-15)
    q = math.sqrt(2) / 4
    assert s_chsh((q, -q, q, q)) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert s_chsh((1, 1, 1, 1)) == 2


def test_s8_examples():
    E = (R2, -R2, R2, R2)
    assert s8(E, E) == pytest.approx(4 * math.sqrt(2), abs=1e-12)
    assert s8((1, 1, 1, 1), (3, 3, 3, 3)) == 8


@given(st.tuples(means, means, means, means))
def test_s8_under_hda_is_twice_chsh(E):
    assert s8(E, tuple(3 * e for e in E)) == pytest.approx(4 * s_chsh(E), abs=1e-12)


def test_s8_rejects_non_finite():
    with pytest.raises(InvalidArgumentError):
        s8((0, 0, 0, 0), (0, math.nan, 0, 0))


def test_delta_examples():
    E = np.array([R2, -R2, R2, R2])
    assert delta(means_of(E, E)) == 0.0
    assert delta(means_of(E, E / 3)) == pytest.approx(2.0, abs=1e-12)
    assert delta(means_of([1, 1, 1, 1], [-1, -1, -1, -1])) == 4.0


def test_delta_zero_denominator_guard():
    assert delta(means_of([0, 0, 0.5, 0.5], [0, 1e-12, 0.5, 0.5])) == 0.0


@given(st.tuples(means, means, means, means), st.tuples(means, means, means, means))
def test_delta_range(f, c):
    assert 0 <= delta(means_of(f, c)) <= 4 + 1e-12


@given(st.lists(st.floats(min_value=-20, max_value=20, allow_nan=False), min_size=1, max_size=200))
def test_hda_zero_delta_implies_chsh_bound(alphas):
    # a local model: at each instant every pair is evaluated on the same alpha;
    # equal factual and counterfactual means give delta = 0 and S <= 2
    a = np.array(alphas)
    E = [conditional_E(x, y, a).mean() for x, y in
         [(0, math.pi / 8), (0, 3 * math.pi / 8), (math.pi / 4, math.pi / 8), (math.pi / 4, 3 * math.pi / 8)]]
    m = means_of(E, E)
    assert delta(m) < 1e-6
    assert s_chsh(E) <= 2 + 1e-12


def test_static_closed_forms_through_ledger():
    # alpha equals a during each quarter; each pair's counterfactual gets its
    # factual value in one of the three other quarters and zero in two
    led = PairLedger()
    pairs = [(0, math.pi / 8), (0, 3 * math.pi / 8), (math.pi / 4, math.pi / 8), (math.pi / 4, 3 * math.pi / 8)]
    for q, (a_q, _) in enumerate(pairs):
        for k, (a, b) in enumerate(pairs):
            led.accumulate(k, k == q, float(conditional_E(a, b, a_q)), 500.0)
    m = pair_means(led)
    assert m.factual == pytest.approx([R2, -R2, R2, R2], abs=1e-12)
    assert m.counterfactual == pytest.approx(np.array([R2, -R2, R2, R2]) / 3, abs=1e-12)
    metrics = metrics_from_ledger(led, mode="exact", seed=0, gamma=1.0, mu_tau=0.0, duration_tau=2000.0)
    assert metrics.delta == pytest.approx(2.0, abs=1e-12)
    assert metrics.s_chsh == pytest.approx(2 * math.sqrt(2), abs=1e-12)
    assert metrics.s8 == pytest.approx(4 * math.sqrt(2), abs=1e-12)


def test_static_alpha_pi8_factual_means():
    pairs = [(0, math.pi / 8), (0, 3 * math.pi / 8), (math.pi / 4, math.pi / 8), (math.pi / 4, 3 * math.pi / 8)]
    E = [conditional_E(a, b, math.pi / 8) for a, b in pairs]
    assert E == pytest.approx([R2, 0, R2, 0], abs=1e-12)


def test_metrics_row_order():
    led = full_ledger(c=(0.5, 0.5, 0.5, 0.5))
    m = metrics_from_ledger(led, mode="sampled", seed=3, gamma=0.5, mu_tau=0.25, duration_tau=10.0)
    row = m.row()
    assert len(row) == len(METRICS_COLUMNS) == 16
    assert row[:5] == ["sampled", "3", "0.5", "0.25", "10.0"]
    assert m.as_dict()["Ecf11"] == "0.5"

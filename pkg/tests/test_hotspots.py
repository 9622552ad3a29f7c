from fractions import Fraction

import numpy as np
import pytest

from urbanlens.hotspots import (
    HotspotResult,
    NodeActivitySeries,
    build_activity_series,
    detect_hotspots,
    stationary_probability,
)


def series(activity, total=None):
    return NodeActivitySeries(node=0, activity=tuple(activity), total=total or sum(activity))


def test_all_zero_series_hand_oracle():
    # 11 transitions, all inactive->inactive; add-one smoothing:
    # a = (0+1)/(0+2) = 1/2, b = (0+1)/(11+2) = 1/13
    # pi = b / (1 - a + b) = (1/13) / (15/26) = 2/15
    [res] = detect_hotspots([series([0] * 12)])
    assert res.p_stay_active == pytest.approx(0.5, abs=1e-15)
    assert res.p_turn_active == pytest.approx(1 / 13, abs=1e-15)
    assert res.stationary_prob == pytest.approx(2 / 15, abs=1e-12)
    assert res.stationary_prob < 0.5
    assert not res.is_hotspot


def test_all_ones_series_hand_oracle():
    # a = (11+1)/(11+2) = 12/13, b = (0+1)/(0+2) = 1/2
    # pi = (1/2) / (1/13 + 1/2) = 13/15 ~= 0.867
    [res] = detect_hotspots([series([1] * 12, total=30)])
    assert res.p_stay_active == pytest.approx(12 / 13, abs=1e-15)
    assert res.p_turn_active == pytest.approx(0.5, abs=1e-15)
    assert res.stationary_prob == pytest.approx(13 / 15, abs=1e-12)
    assert res.stationary_prob > 0.85
    assert res.is_hotspot
    assert res.count == 30


def test_symmetric_chain_is_half():
    assert stationary_probability(0.5, 0.5) == 0.5


def test_min_count_gates_hotspot_status():
    # [0]*8 + [1]*4: n00=7 n01=1 n10=0 n11=3 -> a=4/5, b=1/5, pi=0.5 exactly,
    # but only 4 occurrences: below the minimum count
    [res] = detect_hotspots([series([0] * 8 + [1] * 4)], min_count=5)
    assert res.stationary_prob == pytest.approx(0.5, abs=1e-12)
    assert not res.is_hotspot
    # the same series with enough accumulated occurrences qualifies
    [res2] = detect_hotspots([series([0] * 8 + [1] * 4, total=9)], min_count=5)
    assert res2.is_hotspot


def test_alternating_series_fraction_oracle():
    # series 0,1,0,1,...: n01=6, n10=5, n00=n11=0
    a = Fraction(0 + 1, 5 + 0 + 2)
    b = Fraction(6 + 1, 0 + 6 + 2)
    pi = b / (1 - a + b)
    [res] = detect_hotspots([series([0, 1] * 6)])
    assert res.stationary_prob == pytest.approx(float(pi), abs=1e-15)


def test_stationary_vector_satisfies_pi_equals_pi_p():
    rng = np.random.default_rng(42)
    chains = [detect_hotspots([series([int(v) for v in rng.integers(0, 2, 12)])])[0] for _ in range(50)]
    for res in chains:
        a, b = res.p_stay_active, res.p_turn_active
        pi = np.array([1.0 - res.stationary_prob, res.stationary_prob])
        P = np.array([[1.0 - b, b], [1.0 - a, a]])
        assert np.abs(pi @ P - pi).max() < 1e-12


def test_probabilities_stay_in_unit_interval():
    rng = np.random.default_rng(7)
    for _ in range(100):
        [res] = detect_hotspots([series([int(v) for v in rng.integers(0, 2, 12)])])
        assert 0.0 <= res.p_stay_active <= 1.0
        assert 0.0 <= res.p_turn_active <= 1.0
        assert 0.0 <= res.stationary_prob <= 1.0


def test_build_activity_series():
    sers = build_activity_series(3, crime_nodes=[0, 0, 0, 2], crime_months=[1, 1, 3, 12])
    assert sers[0].activity == (1, 0, 1) + (0,) * 9
    assert sers[0].total == 3
    assert sers[1].activity == (0,) * 12
    assert sers[2].activity == (0,) * 11 + (1,)
    assert len(sers) == 3


def test_series_validation():
    with pytest.raises(ValueError):
        NodeActivitySeries(node=0, activity=(1, 0), total=1)
    with pytest.raises(ValueError):
        NodeActivitySeries(node=0, activity=(1,) * 12, total=3)

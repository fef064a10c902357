import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from partial_id.empirical import Sample
from partial_id.kstest import TestConfig, run_test
from partial_id.mc import (DgpSpec, McConfig, halfline_test, rejection_rates, run_coverage,
                           run_power, run_rejection_table, run_sensitivity, run_tuning_table)
from partial_id.models import TinbergenModel


@pytest.mark.parametrize("u,y", [(0.5, 0.5), (0.1, 0.25), (0.0, 0.15), (1.0, 0.85)])
def test_inverse_cdf_examples(u, y):
    assert float(DgpSpec(0.15).inverse_cdf(u)) == pytest.approx(y)


@given(st.floats(0, 0.3), st.floats(0, 1))
def test_inverse_roundtrip(s, u):
    d = DgpSpec(s)
    assert abs(float(d.cdf(d.inverse_cdf(u))) - u) <= 1e-12


@given(st.floats(0, 0.3))
def test_cdf_is_valid_and_inside_band(s):
    d = DgpSpec(s)
    y = np.linspace(-0.2, 1.2, 2001)
    f = d.cdf(y)
    assert np.all(np.diff(f) >= 0) and f[0] == 0 and f[-1] == 1
    inside = (y >= 0) & (y <= 1)
    assert np.all(f[inside] >= y[inside] - s - 1e-12)
    assert np.all(f[inside] <= y[inside] + s + 1e-12)


def test_identified_dgp_is_uniform():
    y = np.linspace(0, 1, 11)
    np.testing.assert_allclose(DgpSpec(0.0).cdf(y), y, atol=1e-15)


def test_dgp_validation():
    with pytest.raises(ValueError):
        DgpSpec(0.4)
    with pytest.raises(ValueError):
        DgpSpec(0.1).inverse_cdf(1.5)


@pytest.mark.parametrize("h", [0.01, 0.06, 0.2, 2.0])
def test_open_mode_matches_generic_pipeline(h):
    y = DgpSpec(0.15).sample(60, 5, (60, 0))
    stat, crit = halfline_test(y, 0.15, [h], [0.05, 0.1], 200, 5, (60, 0), closed=False)
    sample = Sample.from_arrays(continuous=y)
    for j, a in enumerate((0.05, 0.1)):
        res = run_test(sample, TinbergenModel(0.15), TestConfig(alpha=a, B=200, bandwidth=h, seed=5),
                       path=(60, 0))
        assert stat == res.statistic
        assert crit[0, j] == res.critical_value


def test_closed_mode_dominates_open_class():
    # closed upper sets contain the open ones, so deficiencies can only grow
    y = DgpSpec(0.15).sample(80, 2, (80, 0))
    for h in (0.02, 0.1, 1.0):
        s_open, _ = halfline_test(y, 0.15, [h], [0.05], 100, 2, closed=False)
        s_closed, _ = halfline_test(y, 0.15, [h], [0.05], 100, 2, closed=True)
        assert s_closed >= s_open


def test_bandwidths_share_a_replication():
    y = DgpSpec(0.15).sample(100, 1, (100, 0))
    hs = [0.01, 0.05, 0.1, 0.5]
    _, crit_all, draws = halfline_test(y, 0.15, hs, [0.05], 150, 1, return_draws=True)
    for i, h in enumerate(hs):
        _, crit_one = halfline_test(y, 0.15, [h], [0.05], 150, 1)
        assert crit_one[0, 0] == crit_all[i, 0]
    assert np.all(np.diff(draws, axis=0) >= 0)


def test_rates_are_deterministic_across_workers():
    cfg = McConfig(reps=12, B=50, sample_sizes=(50,))
    a = run_rejection_table(cfg, DgpSpec(0.15))
    b = run_rejection_table(McConfig(reps=12, B=50, sample_sizes=(50,), threads=2), DgpSpec(0.15))
    np.testing.assert_array_equal(a.rates, b.rates)
    assert a.rates.shape == (3, 1)


def test_sensitivity_monotone_per_replication():
    cfg = McConfig(reps=20, B=100)
    curve = run_sensitivity(cfg, DgpSpec(0.15), np.linspace(0.005, 0.15, 8), n=100)
    # a wider filter never turns a non-rejection into a rejection
    assert np.all(np.diff(curve.per_rep.astype(int), axis=1) <= 0)
    np.testing.assert_array_equal(curve.rates, curve.per_rep.mean(axis=0))
    with pytest.raises(ValueError):
        run_sensitivity(cfg, DgpSpec(0.15), [0.0, 0.1])


def test_joint_rates_match_separate_calls():
    cfg = McConfig(reps=10, B=60)
    joint = rejection_rates(cfg, DgpSpec(0.15), 100, [0.05, 0.15])
    tuning = run_tuning_table(cfg, DgpSpec(0.15), {100: (0.05, 0.15)})
    np.testing.assert_array_equal(joint.T, tuning.rates)


def test_power_requires_narrow_model():
    with pytest.raises(ValueError):
        run_power(McConfig(reps=2, B=10), DgpSpec(0.15), 0.2)


def test_coverage_small_run():
    cov = run_coverage(McConfig(reps=10, B=100), p=0.25, thetas=(0.5, 1.0), n=100)
    assert cov.coverage.shape == (2, 3)
    assert np.all(cov.coverage[1] == 1.0)


def test_config_validation():
    with pytest.raises(ValueError):
        McConfig(reps=0)
    with pytest.raises(ValueError):
        McConfig(upper_sets="half")

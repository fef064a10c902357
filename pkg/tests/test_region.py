import numpy as np
import pytest

from partial_id.empirical import Sample
from partial_id.kstest import TestConfig, run_test
from partial_id.models import FAMILIES, JovanovicModel, TinbergenModel
from partial_id.region import (GridSpec, RegionError, RegionResult, RegionRow,
                               confidence_region, region_summary)


def entry_sample(n, ones):
    return Sample.from_arrays(discrete=[1] * ones + [0] * (n - ones))


def test_grid_parse():
    g = GridSpec.parse(["0.05:1:20"])
    assert len(g.points()) == 20
    assert g.points()[0] == (0.05,) and g.points()[-1] == (1.0,)
    assert len(GridSpec.parse(["0:1:3", "0:1:4"]).points()) == 12


@pytest.mark.parametrize("spec", ["1:0:5", "0:1:1", "0:1", "a:b:c"])
def test_grid_parse_errors(spec):
    with pytest.raises(ValueError):
        GridSpec.parse([spec])


def test_entry_game_region():
    s = entry_sample(100, 25)
    grid = GridSpec(((0.1, 1.0, 10),))
    cfg = TestConfig(B=500, seed=4)
    reg = confidence_region(s, FAMILIES["jovanovic"], grid, cfg)
    inc = {round(t[0], 10) for t in reg.included}
    assert 1.0 in inc and 0.1 not in inc
    # agreement with standalone tests under the same seed
    for row in reg.rows:
        res = run_test(s, JovanovicModel(row.theta[0]), cfg)
        assert (res.statistic, res.critical_value, not res.reject) == \
            (row.statistic, row.critical_value, row.in_region)
    summ = region_summary(reg)
    assert summ.axes[0].contiguous and summ.axes[0].hi == 1.0
    assert reg.summary()[0][1] == 1.0


def test_region_threads_identical():
    s = Sample.from_arrays(continuous=np.random.default_rng(2).random(60))
    grid = GridSpec(((0.0, 0.3, 7),))
    a = confidence_region(s, FAMILIES["tinbergen"], grid, TestConfig(B=200, seed=1))
    b = confidence_region(s, FAMILIES["tinbergen"], grid, TestConfig(B=200, seed=1, threads=3))
    assert a.rows == b.rows


def test_band_region_upper_closed():
    # wider bands are never rejected once a narrower one is accepted
    s = Sample.from_arrays(continuous=np.random.default_rng(3).random(80))
    reg = confidence_region(s, FAMILIES["tinbergen"], GridSpec(((0.0, 0.4, 9),)),
                            TestConfig(B=200, seed=5))
    flags = [r.in_region for r in reg.rows]
    assert flags == sorted(flags)


def rows(flags):
    return RegionResult([RegionRow((float(i),), 0.0, 0.0, f) for i, f in enumerate(flags)])


def test_summary_cases():
    assert region_summary(rows([False, True, True])).message == "contiguous"
    gap = region_summary(rows([True, False, True]))
    assert gap.message == "non-contiguous" and not gap.axes[0].contiguous
    empty = region_summary(rows([False, False]))
    assert empty.empty and "every grid point" in empty.message


def test_region_error_names_theta():
    s = entry_sample(20, 5)
    with pytest.raises(RegionError, match="theta"):
        confidence_region(s, FAMILIES["jovanovic"], GridSpec(((0.0, 1.0, 3),)), TestConfig(B=20))
    with pytest.raises(RegionError):
        confidence_region(s, FAMILIES["tinbergen"], GridSpec(((0.0, 0.2, 3),)), TestConfig(B=20))

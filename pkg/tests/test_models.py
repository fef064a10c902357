import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from partial_id.empirical import RectSet, Sample, generate_class
from partial_id.models import (JovanovicModel, ModelSpaceError, TabulatedModel, TinbergenModel,
                               jovanovic_identified_set, nu_gamma_eval,
                               tinbergen_consistency_bounds)

ONE, ZERO, BOTH = frozenset({(1,)}), frozenset({(0,)}), frozenset({(0,), (1,)})


def half(y):
    return RectSet(frozenset({()}), (y,))


def test_jovanovic_values():
    m = JovanovicModel(0.5)
    assert nu_gamma_eval(m, RectSet(ONE, ())) == 0.25
    assert nu_gamma_eval(m, RectSet(BOTH, ())) == 1.0
    assert nu_gamma_eval(m, RectSet(ZERO, ())) == 1.0
    assert nu_gamma_eval(m, RectSet(frozenset(), ())) == 0.0
    # complement of {0} within {0, 1}
    assert nu_gamma_eval(m, RectSet(ZERO, (), True)) == 0.25


@given(st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_jovanovic_increasing(a, b):
    lo, hi = sorted((a, b))
    assert JovanovicModel(lo).nu_gamma(RectSet(ONE, ())) <= JovanovicModel(hi).nu_gamma(RectSet(ONE, ()))
    assert JovanovicModel(1.0).nu_gamma(RectSet(ONE, ())) == 1.0


def test_jovanovic_rejects_other_spaces():
    with pytest.raises(ValueError):
        JovanovicModel(0.0)
    with pytest.raises(ModelSpaceError):
        JovanovicModel(0.5).nu_gamma(RectSet(frozenset({(2,)}), ()))
    with pytest.raises(ModelSpaceError):
        JovanovicModel(0.5).nu_gamma(half(0.3))


def test_tinbergen_values():
    m = TinbergenModel(0.15)
    assert m.nu_gamma(half(0.5)) == pytest.approx(0.65)
    assert m.nu_gamma(half(0.5).complement()) == pytest.approx(0.65)
    assert m.nu_gamma(half(0.95)) == 1.0
    assert m.nu_gamma(RectSet.empty(1)) == 0.0
    assert m.nu_gamma(RectSet.empty(1).complement()) == 1.0


@given(st.floats(0, 1))
def test_tinbergen_exact_case_is_a_measure(y):
    m = TinbergenModel(0.0)
    assert m.nu_gamma(half(y)) + m.nu_gamma(half(y).complement()) == pytest.approx(1.0, abs=1e-15)


@given(st.floats(0, 0.3), st.floats(0, 1))
def test_tinbergen_band_overlaps(s, y):
    m = TinbergenModel(s)
    total = m.nu_gamma(half(y)) + m.nu_gamma(half(y).complement())
    assert total >= 1.0 - 1e-15
    if s > 1e-9 and s < y < 1 - s:
        assert total > 1.0


@given(st.floats(0, 0.9), st.lists(st.floats(-0.5, 1.5), min_size=2, max_size=6))
def test_tinbergen_monotone(s, ys):
    m = TinbergenModel(s)
    sets = [half(y) for y in ys] + [half(y).complement() for y in ys]
    sets += [RectSet.empty(1), RectSet.empty(1).complement()]
    for a in sets:
        for b in sets:
            if a.subset_of(b):
                assert m.nu_gamma(a) <= m.nu_gamma(b)


def test_jovanovic_monotone_on_class():
    s = Sample.from_arrays(discrete=[0, 1])
    cls = generate_class(s)
    for th in (0.1, 0.5, 1.0):
        m = JovanovicModel(th)
        for a in cls:
            for b in cls:
                if a.subset_of(b):
                    assert m.nu_gamma(a) <= m.nu_gamma(b)


@pytest.mark.parametrize("p,expected", [(0.25, (0.5, 1.0)), (0.0, (0.0, 1.0)), (1.0, (1.0, 1.0))])
def test_identified_set(p, expected):
    assert jovanovic_identified_set(p) == expected


def test_identified_set_domain():
    with pytest.raises(ValueError):
        jovanovic_identified_set(1.2)


@pytest.mark.parametrize("s,y,expected", [(0.15, 0.5, (0.35, 0.65)), (0.0, 0.3, (0.3, 0.3)),
                                          (0.15, 0.05, (0.0, 0.20))])
def test_consistency_bounds(s, y, expected):
    assert tinbergen_consistency_bounds(TinbergenModel(s), y) == pytest.approx(expected)


def test_consistency_bounds_domain():
    with pytest.raises(ValueError):
        tinbergen_consistency_bounds(TinbergenModel(0.1), 1.5)


def test_tabulated_roundtrip(tmp_path):
    path = tmp_path / "nu.csv"
    path.write_text('set,nu_gamma\n{},0\n{0},1\n{1},0.36\n"{0,1}",1\n')
    m = TabulatedModel.from_csv(path)
    assert m.nu_gamma(RectSet(ONE, ())) == 0.36
    assert m.nu_gamma(RectSet(frozenset(), ())) == 0.0
    with pytest.raises(ModelSpaceError):
        m.nu_gamma(RectSet(frozenset({(2,)}), ()))


def test_tabulated_matches_jovanovic_on_class():
    values = {"{}": 0, "{0}": 1, "{1}": 0.25, "{0,1}": 1}
    tab, jov = TabulatedModel(values, 1), JovanovicModel(0.5)
    for a in generate_class(Sample.from_arrays(discrete=[0, 1, 1])):
        assert tab.nu_gamma(a) == jov.nu_gamma(a)


@pytest.mark.parametrize("values,msg", [
    ({"{}": 0.1, "{0}": 1}, "empty set"),
    ({"{}": 0, "{0}": 0.5, "{0,1}": 0.4}, "not monotone"),
    ({"{}": 0, "{0}": 1.5}, "outside"),
])
def test_tabulated_validation(values, msg):
    with pytest.raises(ValueError, match=msg):
        TabulatedModel(values, 1)


def test_tabulated_continuous_labels():
    s = Sample.from_arrays(continuous=[0.2, 0.6])
    tin = TinbergenModel(0.1)
    values = {a.label(): tin.nu_gamma(a) for a in generate_class(s)}
    tab = TabulatedModel(values, 0, 1)
    for a in generate_class(s):
        assert tab.nu_gamma(a) == tin.nu_gamma(a)
    np.testing.assert_equal(tab.nu_gamma_many(generate_class(s)), tin.nu_gamma_many(generate_class(s)))

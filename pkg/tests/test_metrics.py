import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from parcelsteer import (
    TimeCourse,
    distance_matrix,
    fc_filter,
    fc_matrix,
    homogeneity,
    mean_se,
    pairwise_r,
    pearson_r,
)
from parcelsteer.errors import InvalidRange, LengthMismatch, ZeroVariance


def tc(values, sources=1):
    return TimeCourse(samples=np.asarray(values, dtype=np.float64), source_count=sources)


# -- pearson_r against an independent reference


def test_pearson_matches_scipy(rng):
    for _ in range(200):
        x = rng.standard_normal(100)
        y = rng.standard_normal(100)
        ours = pearson_r(tc(x), tc(y))
        ref = scipy.stats.pearsonr(x, y).statistic
        assert abs(ours - ref) <= 1e-10


def test_pearson_affine_invariance(rng):
    x = rng.standard_normal(80)
    y = rng.standard_normal(80)
    base = pearson_r(tc(x), tc(y))
    assert abs(pearson_r(tc(3.7 * x + 11.0), tc(y)) - base) <= 1e-12
    assert abs(pearson_r(tc(x), tc(0.002 * y - 5.0)) - base) <= 1e-12
    assert abs(pearson_r(tc(-2.0 * x), tc(y)) + base) <= 1e-12  # sign flips


def test_pearson_exact_for_identical_and_opposite():
    x = np.array([0.1, -2.3, 4.5, 0.0, 1.1])
    assert pearson_r(tc(x), tc(x)) == 1.0
    assert pearson_r(tc(x), tc(-x)) == -1.0


def test_pearson_errors():
    with pytest.raises(ZeroVariance):
        pearson_r(tc([1.0, 1.0, 1.0]), tc([1.0, 2.0, 3.0]))
    with pytest.raises(ZeroVariance):
        pearson_r(tc([1.0, 2.0, 3.0]), tc([0.0, 0.0, 0.0]))
    with pytest.raises(LengthMismatch):
        pearson_r(tc([1.0, 2.0]), tc([1.0, 2.0, 3.0]))


@given(
    x=arrays(np.float64, 20, elements=st.floats(-1e6, 1e6)),
    y=arrays(np.float64, 20, elements=st.floats(-1e6, 1e6)),
)
@settings(max_examples=200, deadline=None)
def test_pearson_always_in_unit_interval(x, y):
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        with pytest.raises(ZeroVariance):
            pearson_r(tc(x), tc(y))
    else:
        r = pearson_r(tc(x), tc(y))
        assert -1.0 <= r <= 1.0
        assert r == pearson_r(tc(y), tc(x))


# -- pairwise matrices


def test_pairwise_matches_corrcoef(rng):
    x = rng.standard_normal((6, 50))
    r, degenerate = pairwise_r(x)
    assert not degenerate.any()
    assert np.allclose(r, np.corrcoef(x), atol=1e-12)
    assert np.array_equal(r, r.T)
    assert np.all(np.diag(r) == 1.0)


def test_pairwise_identical_rows_exactly_one(rng):
    base = rng.standard_normal(40)
    x = np.vstack([base, base * 2.0, base.copy()])
    r, _ = pairwise_r(x)
    assert r[0, 2] == 1.0  # bitwise-equal rows, exact unity
    assert r[2, 0] == 1.0
    assert abs(r[0, 1] - 1.0) <= 1e-12  # scaled copy only promised within fp


def test_pairwise_degenerate_rows(rng):
    x = rng.standard_normal((3, 30))
    x[1] = 5.0  # constant
    r, degenerate = pairwise_r(x)
    assert list(degenerate) == [False, True, False]
    assert r[0, 1] == 0.0 and r[1, 2] == 0.0
    assert r[1, 1] == 1.0  # diagonal stays unity even for constants


def test_distance_matrix_values_and_indexing(rng):
    courses = [tc(rng.standard_normal(25)) for _ in range(5)]
    dm = distance_matrix(courses)
    assert dm.n == 5 and dm.d.shape == (10,)
    for i in range(5):
        for j in range(i + 1, 5):
            want = 1.0 - pearson_r(courses[i], courses[j])
            assert dm.get(i, j) == pytest.approx(want, abs=1e-12)
            assert dm.get(j, i) == dm.get(i, j)
    square = dm.as_square()
    assert np.array_equal(square, square.T)
    assert np.all(np.diag(square) == 0.0)
    assert np.all(dm.d >= 0.0) and np.all(dm.d <= 2.0)


def test_distance_matrix_flags_constant_courses():
    courses = [tc([1.0, 2.0, 3.0]), tc([4.0, 4.0, 4.0]), tc([3.0, 1.0, 2.0])]
    dm = distance_matrix(courses)
    assert dm.get(0, 1) == 1.0  # r = 0 convention
    assert bool(dm.degenerate[dm.index(0, 1)])
    assert not bool(dm.degenerate[dm.index(0, 2)])


# -- homogeneity


def test_homogeneity_hand_computed():
    a = tc([1.0, 2.0, 3.0, 4.0])
    b = tc([2.0, 4.0, 6.0, 8.0])  # r(a,b) = 1
    c = tc([4.0, 3.0, 2.0, 1.0])  # r(a,c) = r(b,c) = -1
    assert homogeneity([a, b]) == pytest.approx(1.0)
    assert homogeneity([a, b, c]) == pytest.approx((1.0 - 1.0 - 1.0) / 3.0)


def test_homogeneity_singleton_is_one(rng):
    assert homogeneity([tc(rng.standard_normal(10))]) == 1.0


def test_homogeneity_identical_courses_exactly_one():
    x = [tc([0.5, 1.5, -2.0, 0.25])] * 4
    assert homogeneity(x) == 1.0


# -- banded mean +/- standard error


def test_mean_se_matches_scipy(rng):
    x = rng.standard_normal((7, 30))
    band = mean_se([tc(row) for row in x])
    assert band.n_members == 7
    assert np.allclose(band.mean, x.mean(axis=0), atol=1e-14)
    assert np.allclose(band.se, scipy.stats.sem(x, axis=0, ddof=1), atol=1e-14)


def test_mean_se_single_member_is_flat(rng):
    x = rng.standard_normal(12)
    band = mean_se([tc(x)])
    assert np.array_equal(band.mean, x)
    assert np.all(band.se == 0.0)


# -- functional connectivity


def test_fc_matrix_basic(rng):
    x = rng.standard_normal((4, 40))
    m = fc_matrix([(10, tc(x[0])), (20, tc(x[1])), (30, tc(x[2])), (40, tc(x[3]))])
    assert m.parcel_ids == (10, 20, 30, 40)
    assert np.all(np.diag(m.r) == 1.0)
    assert np.allclose(m.r, np.corrcoef(x), atol=1e-12)
    assert not m.degenerate.any()


def test_fc_matrix_degenerate_pairs(rng):
    rows = [tc(rng.standard_normal(20)), tc(np.zeros(20) + 3.0)]
    m = fc_matrix([(1, rows[0]), (2, rows[1])])
    assert m.r[0, 1] == 0.0
    assert bool(m.degenerate[0, 1]) and bool(m.degenerate[1, 0])
    assert not bool(m.degenerate[0, 0])


def test_fc_filter_bounds_and_order():
    r = np.array(
        [
            [1.0, 0.9, -0.5, 0.1],
            [0.9, 1.0, 0.5, 0.0],
            [-0.5, 0.5, 1.0, -0.9],
            [0.1, 0.0, -0.9, 1.0],
        ]
    )
    from parcelsteer import FCMatrix

    fcm = FCMatrix(parcel_ids=(0, 1, 2, 3), r=r, degenerate=np.zeros((4, 4), bool))
    full = fc_filter(fcm, 0.0, 1.0)
    assert len(full) == 6
    # strongest first; |0.9| ties break on (i, j)
    assert [(i, j) for i, j, _ in full[:2]] == [(0, 1), (2, 3)]
    band = fc_filter(fcm, 0.5, 0.5)  # bounds inclusive on both ends
    assert {(i, j) for i, j, _ in band} == {(0, 2), (1, 2)}
    assert fc_filter(fcm, 0.95, 1.0) == []
    with pytest.raises(InvalidRange):
        fc_filter(fcm, 0.8, 0.2)


@given(
    x=arrays(
        np.float64,
        st.tuples(st.integers(2, 6), st.integers(3, 12)),
        elements=st.floats(-100.0, 100.0),
    )
)
@settings(max_examples=150, deadline=None)
def test_pairwise_properties(x):
    r, degenerate = pairwise_r(x)
    assert r.shape == (x.shape[0], x.shape[0])
    assert np.all(r >= -1.0) and np.all(r <= 1.0)
    assert np.array_equal(r, r.T)
    assert np.all(np.diag(r) == 1.0)
    # degenerate rows correlate with nothing
    for i in np.flatnonzero(degenerate):
        off = np.delete(r[i], i)
        assert np.all(off == 0.0)

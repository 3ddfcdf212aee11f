import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from backhaulkit.errors import InputError
from backhaulkit.fairness import LorenzCurve, db_to_linear, gini, gini_from_lorenz, gini_snr, lorenz


def pairwise_gini(x):
    """Double-sum definition, used as the oracle."""
    x = np.asarray(x, dtype=float)
    n = x.size
    return float(np.abs(x[:, None] - x[None, :]).sum() / (2 * n * n * x.mean()))


observations = st.lists(st.floats(0, 1e6, allow_nan=False), min_size=1, max_size=60).filter(
    lambda xs: sum(xs) > 1e-6
)


@pytest.mark.parametrize("values,expected", [([5, 5, 5, 5], 0.0), ([0, 1], 0.5), ([0, 0, 0, 7], 0.75), ([0, 0, 0, 3.7], 0.75)])
def test_examples(values, expected):
    assert gini(values) == expected
    assert gini_snr(values) == expected
    assert gini_from_lorenz(lorenz(values)) == pytest.approx(expected, abs=1e-15)


def test_lorenz_points():
    assert lorenz([1, 1, 1, 1]).points == [(k / 4, k / 4) for k in range(5)]
    assert lorenz([0, 1]).points == [(0.0, 0.0), (0.5, 0.0), (1.0, 1.0)]
    assert lorenz([0, 0, 0, 1]).points == [(0, 0), (0.25, 0), (0.5, 0), (0.75, 0), (1, 1)]


@pytest.mark.parametrize("bad", [[], [0, 0, 0], [1, -1], [1, np.nan], [np.inf]])
def test_invalid(bad):
    with pytest.raises(InputError):
        gini(bad)


def test_malformed_curve():
    with pytest.raises(InputError):
        gini_from_lorenz(LorenzCurve(np.array([0, 0.5, 1]), np.array([0, 0.8, 1])))
    with pytest.raises(InputError):
        gini_from_lorenz(LorenzCurve(np.array([0, 1]), np.array([0, 0.5])))
    with pytest.raises(InputError):
        gini_from_lorenz(LorenzCurve(np.array([0, 0.6, 0.5, 1]), np.array([0, 0, 0.1, 1])))


def test_db_to_linear():
    np.testing.assert_allclose(db_to_linear([0, 10, 20]), [1, 10, 100])


@given(observations)
def test_matches_double_sum(xs):
    assert gini(xs) == pytest.approx(pairwise_gini(xs), abs=1e-12)


@given(observations)
def test_bounds(xs):
    n = len(xs)
    assert 0 <= gini(xs) <= (n - 1) / n + 1e-12


@given(observations, st.floats(1e-3, 1e3))
def test_scale_invariance(xs, c):
    assert gini(np.asarray(xs) * c) == pytest.approx(gini(xs), abs=1e-12)


@given(observations, st.randoms(use_true_random=False))
def test_permutation_invariance(xs, rnd):
    ys = list(xs)
    rnd.shuffle(ys)
    assert gini(ys) == pytest.approx(gini(xs), abs=1e-12)


@given(observations, st.integers(1, 5))
def test_replication_invariance(xs, k):
    assert gini(xs * k) == pytest.approx(gini(xs), abs=1e-12)


@given(observations)
def test_lorenz_consistency(xs):
    assert gini_from_lorenz(lorenz(xs)) == pytest.approx(gini(xs), abs=1e-12)

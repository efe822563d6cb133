import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attrcluster.correlation import (
    correlation_matrix,
    determination_matrix,
    pearson,
    random_component,
)
from attrcluster.encoder import EncodedAttribute, EncodedMatrix, Encoding, Label
from attrcluster.errors import DataError, NumericError
from reference import CORRELATION, SHORT_LABELS


def naive_pearson(x, y):
    """Textbook covariance over the product of standard deviations, plain loops."""
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxy = sum((x[i] - mx) * (y[i] - my) for i in range(n))
    sxx = sum((x[i] - mx) ** 2 for i in range(n))
    syy = sum((y[i] - my) ** 2 for i in range(n))
    return sxy / (math.sqrt(sxx) * math.sqrt(syy))


def matrix_of(X):
    X = np.asarray(X, dtype=float)
    attrs = tuple(
        EncodedAttribute(Label(f"A{j + 1}", f"c{j}"), X[:, j], j, Encoding.PASSTHROUGH)
        for j in range(X.shape[1])
    )
    return EncodedMatrix(attrs, X.shape[0])


def idx(label):
    return SHORT_LABELS.index(label)


def test_random_component():
    assert list(random_component([1, 2, 3])) == [-1, 0, 1]
    assert list(random_component([4, 4, 4])) == [0, 0, 0]
    assert list(random_component([0, 0, 1, 1])) == [-0.5, -0.5, 0.5, 0.5]


@given(st.lists(st.integers(-10**6, 10**6), min_size=2, max_size=50))
def test_random_component_sums_to_zero(values):
    x = np.array(values, dtype=float)
    scale = max(1.0, np.abs(x).max())
    assert abs(random_component(x).sum()) <= 1e-12 * len(x) * scale


def test_weather_pairs(weather_matrix):
    X = weather_matrix.values
    assert pearson(X[:, idx("A4")], X[:, idx("A5")]) == pytest.approx(0.258, abs=5e-4)
    assert pearson(X[:, idx("A3>1")], X[:, idx("A3>2")]) == pytest.approx(-1.0, abs=1e-12)


def test_affine_invariance_pair():
    x = np.array([1.0, 3.0, 2.0, 7.0])
    assert pearson(x, 5 + 2 * x) == pytest.approx(1.0, abs=1e-15)
    assert pearson(x, 5 - 2 * x) == pytest.approx(-1.0, abs=1e-15)


def test_zero_variance_names_column():
    with pytest.raises(NumericError, match="'flat'"):
        pearson([1, 2, 3], [4, 4, 4], names=("x", "flat"))


def test_weather_matrix(weather_matrix):
    R = correlation_matrix(weather_matrix).R
    assert np.max(np.abs(R - CORRELATION)) <= 1e-3
    assert np.array_equal(R, R.T)
    assert np.all(np.diag(R) == 1.0)


def test_single_column():
    assert correlation_matrix(matrix_of([[1], [2], [4]])).R.tolist() == [[1.0]]


def test_orthogonal_columns():
    R = correlation_matrix(matrix_of([[1, 1], [-1, 1], [1, -1], [-1, -1]])).R
    assert R[0, 1] == 0.0


def test_constant_column_never_reaches_correlation():
    with pytest.raises(DataError, match="c1"):
        matrix_of([[1, 4], [2, 4], [3, 4]])


def test_determination(weather_matrix):
    D = determination_matrix(correlation_matrix(weather_matrix)).D
    assert D[idx("A3>1"), idx("A2>3")] == pytest.approx(0.400, abs=5e-4)
    assert D[idx("A1>1"), idx("A1>3")] == pytest.approx(0.309, abs=5e-4)
    assert np.all(np.diag(D) == 1.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_naive_formula(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(20, 5)) * rng.uniform(0.1, 10, 5) + rng.uniform(-5, 5, 5)
    R = correlation_matrix(matrix_of(X)).R
    for i in range(5):
        for j in range(5):
            expected = 1.0 if i == j else naive_pearson(list(X[:, i]), list(X[:, j]))
            assert abs(R[i, j] - expected) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_affine_maps(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(20, 5))
    a = rng.uniform(-10, 10, 5)
    b = rng.uniform(0.1, 10, 5) * rng.choice([-1, 1], 5)
    R = correlation_matrix(matrix_of(X)).R
    R2 = correlation_matrix(matrix_of(a + b * X)).R
    signs = np.sign(b)
    assert np.max(np.abs(R2 - R * np.outer(signs, signs))) <= 1e-12

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attrcluster.eigen import canonical_signs, eigh_symmetric, jacobi_eigh
from attrcluster.errors import NumericError
from reference import EIGENVALUES


def random_correlation(rng, n, rank=None):
    m = rank or n
    A = rng.normal(size=(3 * n, m)) @ rng.normal(size=(m, n))
    A -= A.mean(axis=0)
    A /= np.linalg.norm(A, axis=0)
    R = A.T @ A
    R = (R + R.T) / 2
    np.fill_diagonal(R, 1.0)
    return R


def check_invariants(R, eig):
    n = R.shape[0]
    lam, U = eig.lam, eig.U
    assert np.all(np.diff(lam) <= 0)
    assert np.all(lam >= -1e-10)
    assert np.max(np.abs(R @ U - U * lam)) <= 1e-8
    assert np.max(np.abs(U.T @ U - np.eye(n))) <= 1e-10
    assert abs(lam.sum() - np.trace(R)) <= 1e-8
    assert np.max(np.abs(U @ np.diag(lam) @ U.T - R)) <= 1e-8


def test_weather(weather_fa):
    lam = weather_fa.eig.lam
    assert np.max(np.abs(lam[:7] - EIGENVALUES)) <= 0.01
    assert np.all(lam[7:] <= 1e-8)
    check_invariants(weather_fa.corr.R, weather_fa.eig)


def test_identity():
    eig = eigh_symmetric(np.eye(4))
    assert np.array_equal(eig.lam, np.ones(4))
    assert np.allclose(np.abs(eig.U), np.eye(4)[:, np.argmax(np.abs(eig.U), axis=0)])
    assert np.allclose(np.abs(eig.U).sum(axis=0), 1)


@pytest.mark.parametrize("r", [0.6, -0.3, 0.95])
def test_two_by_two(r):
    eig = eigh_symmetric(np.array([[1, r], [r, 1]]))
    assert eig.lam == pytest.approx(sorted([1 + r, 1 - r], reverse=True), abs=1e-14)
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    first, second = (plus, minus) if r > 0 else (minus, plus)
    assert abs(eig.U[:, 0] @ first) == pytest.approx(1, abs=1e-12)
    assert abs(eig.U[:, 1] @ second) == pytest.approx(1, abs=1e-12)


def test_sign_convention():
    U = canonical_signs(np.array([[0.6, -0.8], [-0.8, 0.6]]))
    assert U[1, 0] == 0.8 and U[0, 1] == 0.8
    # equal magnitudes: first index decides
    U = canonical_signs(np.array([[-0.5], [0.5]]))
    assert U[0, 0] == 0.5


def test_rejects_asymmetric():
    with pytest.raises(NumericError):
        eigh_symmetric(np.array([[1.0, 0.2], [0.3, 1.0]]))


def test_sweep_budget():
    rng = np.random.default_rng(0)
    with pytest.raises(NumericError, match="off-diagonal"):
        jacobi_eigh(random_correlation(rng, 8), max_sweeps=1)


def test_deterministic(weather_fa):
    again = eigh_symmetric(weather_fa.corr)
    assert np.array_equal(again.lam, weather_fa.eig.lam)
    assert np.array_equal(again.U, weather_fa.eig.U)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 12))
def test_against_lapack(seed, n):
    rng = np.random.default_rng(seed)
    R = random_correlation(rng, n)
    eig = eigh_symmetric(R)
    check_invariants(R, eig)
    assert np.allclose(eig.lam, np.sort(np.linalg.eigvalsh(R))[::-1], rtol=0, atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 10))
def test_rank_deficient(seed, n):
    rng = np.random.default_rng(seed)
    R = random_correlation(rng, n, rank=2)
    eig = eigh_symmetric(R)
    check_invariants(R, eig)
    assert np.all(eig.lam[2:] <= 1e-8)

"""
Cyclic Jacobi eigensolver for symmetric matrices.

Correlation matrices here are small (tens to a few hundred attributes), dense
and positive semi-definite, which is the case Jacobi handles best: it is
unconditionally stable and delivers eigenvectors orthonormal to working
precision, including for the repeated zero eigenvalues produced by
complementary one-hot columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError

MAX_SWEEPS = 100
ZERO_EIGENVALUE = 1e-12


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenvalues sorted non-increasingly; column ``j`` of ``U`` pairs with ``lam[j]``."""

    lam: np.ndarray
    U: np.ndarray
    sweeps: int = 0

    @property
    def n(self) -> int:
        return self.lam.size


def _off_norm(A: np.ndarray) -> float:
    # summed directly; subtracting the diagonal from the full norm cancels badly
    off = A[~np.eye(A.shape[0], dtype=bool)]
    return float(np.sqrt(np.dot(off, off)))


def jacobi_eigh(
    A, tol: float | None = None, max_sweeps: int = MAX_SWEEPS
) -> tuple[np.ndarray, np.ndarray, int]:
    """
    Diagonalise a symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    A : array-like, shape (n, n)
        Symmetric matrix.
    tol : float, optional
        Stop once the off-diagonal Frobenius norm falls below this.
        Defaults to ``1e-12 * n``.
    max_sweeps : int
        Sweep budget; exceeding it raises :class:`NumericError`.

    Returns
    -------
    w : ndarray
        Unsorted eigenvalues (the final diagonal).
    V : ndarray
        Orthogonal matrix whose columns are the matching eigenvectors.
    sweeps : int
        Number of full sweeps performed.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.ndim != 2 or A.shape != (n, n):
        raise NumericError("jacobi_eigh expects a square matrix")
    if not np.allclose(A, A.T, rtol=0, atol=1e-12):
        raise NumericError("jacobi_eigh expects a symmetric matrix")
    A = (A + A.T) / 2
    V = np.eye(n)
    if tol is None:
        tol = 1e-12 * max(n, 1)

    sweeps = 0
    while _off_norm(A) > tol:
        if sweeps >= max_sweeps:
            raise NumericError(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {_off_norm(A):.3e})"
            )
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) plane rotation
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap = A[p, :].copy()
                aq = A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    return np.diag(A).copy(), V, sweeps


def canonical_signs(U: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    """Flip columns so the entry of largest magnitude is positive (first one on ties)."""
    U = U.copy()
    for j in range(U.shape[1]):
        col = np.abs(U[:, j])
        i = int(np.flatnonzero(col >= col.max() - atol)[0])
        if U[i, j] < 0:
            U[:, j] = -U[:, j]
    return U


def eigh_symmetric(R, max_sweeps: int = MAX_SWEEPS) -> EigenDecomposition:
    R = getattr(R, "R", R)
    w, V, sweeps = jacobi_eigh(R, max_sweeps=max_sweeps)
    order = np.argsort(-w, kind="stable")
    lam = w[order]
    lam[lam < ZERO_EIGENVALUE] = 0.0
    U = canonical_signs(V[:, order])
    lam.setflags(write=False)
    U.setflags(write=False)
    return EigenDecomposition(lam, U, sweeps)

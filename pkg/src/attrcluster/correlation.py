"""
Pearson correlation as the cosine between centred column vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoder import EncodedMatrix, Label
from .errors import NumericError

# slack allowed before an out-of-range coefficient counts as a bug
_RANGE_SLACK = 1e-9


def random_component(values) -> np.ndarray:
    """The values minus their mean."""
    x = np.asarray(values, dtype=float)
    return x - x.mean()


def pearson(x, y, names: tuple[str, str] = ("x", "y")) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise NumericError("pearson needs two equal-length vectors of length >= 2")
    for v, name in ((x, names[0]), (y, names[1])):
        if np.all(v == v[0]):
            raise NumericError(f"column {name!r} has zero variance")
    x0, y0 = random_component(x), random_component(y)
    nx, ny = np.sqrt(np.dot(x0, x0)), np.sqrt(np.dot(y0, y0))
    for norm, name in ((nx, names[0]), (ny, names[1])):
        if norm == 0.0:
            raise NumericError(f"column {name!r} has zero variance")
    return _clamp(float(np.dot(x0, y0) / (nx * ny)))


def _clamp(r):
    if np.any(np.abs(r) > 1.0 + _RANGE_SLACK):
        raise NumericError(f"correlation out of range: {np.max(np.abs(r))!r}")
    return np.clip(r, -1.0, 1.0) if isinstance(r, np.ndarray) else min(1.0, max(-1.0, r))


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    R: np.ndarray
    labels: tuple[Label, ...]

    @property
    def n(self) -> int:
        return self.R.shape[0]


@dataclass(frozen=True, eq=False)
class DeterminationMatrix:
    D: np.ndarray
    labels: tuple[Label, ...]


def correlation_matrix(matrix: EncodedMatrix) -> CorrelationMatrix:
    X = matrix.values
    labels = matrix.labels
    for j, label in enumerate(labels):
        col = X[:, j]
        if np.all(col == col[0]):
            raise NumericError(f"column {label.full!r} has zero variance")

    X0 = X - X.mean(axis=0)
    norms = np.sqrt(np.einsum("ij,ij->j", X0, X0))
    if np.any(norms == 0):
        bad = labels[int(np.argmin(norms))]
        raise NumericError(f"column {bad.full!r} has zero variance")
    Z = X0 / norms

    # one value per pair, mirrored, so symmetry is exact
    R = np.triu(Z.T @ Z, k=1)
    R = R + R.T
    np.fill_diagonal(R, 1.0)
    R = _clamp(R)
    R.setflags(write=False)
    return CorrelationMatrix(R, labels)


def determination_matrix(corr: CorrelationMatrix) -> DeterminationMatrix:
    D = corr.R**2
    np.fill_diagonal(D, 1.0)
    D.setflags(write=False)
    return DeterminationMatrix(D, corr.labels)

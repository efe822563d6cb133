"""
Principal-component factor model: loadings, common variances, factor-count
selection and Varimax rotation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .eigen import EigenDecomposition
from .encoder import Label
from .errors import ConfigError, NumericError

DEFAULT_EPSILON = 0.55
VARIMAX_TOL = 1e-10
VARIMAX_MAX_SWEEPS = 1000

# rows this short are treated as zero-communality during Kaiser normalisation
_ZERO_ROW = 1e-15


def factor_names(k: int) -> tuple[str, ...]:
    return tuple(f"F{j + 1}" for j in range(k))


@dataclass(frozen=True, eq=False)
class LoadingMatrix:
    L: np.ndarray
    labels: tuple[Label, ...]
    factor_names: tuple[str, ...] = ()

    def __post_init__(self):
        L = np.array(self.L, dtype=float, ndmin=2)
        L.setflags(write=False)
        object.__setattr__(self, "L", L)
        if not self.factor_names:
            object.__setattr__(self, "factor_names", factor_names(L.shape[1]))
        if len(self.labels) != L.shape[0] or len(self.factor_names) != L.shape[1]:
            raise NumericError("loading matrix shape does not match its labels")

    @property
    def n(self) -> int:
        return self.L.shape[0]

    @property
    def k(self) -> int:
        return self.L.shape[1]


@dataclass(frozen=True, eq=False)
class CommonVarianceMatrix:
    V: np.ndarray
    labels: tuple[Label, ...]
    factor_names: tuple[str, ...]

    @property
    def row_total(self) -> np.ndarray:
        """Communality: variance of each attribute reproduced by the kept factors."""
        return self.V.sum(axis=1)


@dataclass(frozen=True, eq=False)
class CumulativeVarianceMatrix:
    VC: np.ndarray
    labels: tuple[Label, ...]

    @property
    def column_min(self) -> np.ndarray:
        return self.VC.min(axis=0)

    @property
    def column_mean(self) -> np.ndarray:
        return self.VC.mean(axis=0)

    def argmin(self, j: int, atol: float = 1e-12) -> int:
        """Row holding the column-``j`` minimum; lowest index among near-ties."""
        col = self.VC[:, j]
        return int(np.flatnonzero(col <= col.min() + atol)[0])


@dataclass(frozen=True)
class FactorSelection:
    nof: int
    epsilon: float
    min_var: float
    min_var_attribute: Label


@dataclass(frozen=True)
class VarianceReport:
    scree_fraction: tuple[float, ...]
    min_var: tuple[float, ...]
    aver_var: tuple[float, ...]
    min_var_id: tuple[Label, ...]

    def rows(self, label_mode: str = "short") -> list[list]:
        """Table layout: one row per quantity, one column per factor count."""
        n = len(self.scree_fraction)
        return [
            ["Factors", *range(1, n + 1)],
            ["ScreePlt", *self.scree_fraction],
            ["MinVar", *self.min_var],
            ["AverVar", *self.aver_var],
            ["MinVarId", *(lab.get(label_mode) for lab in self.min_var_id)],
        ]


def validate_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not 0.5 < epsilon < 1.0:
        raise ConfigError(f"epsilon must lie in (0.5, 1), got {epsilon}")
    return epsilon


def full_loadings(eig: EigenDecomposition, labels) -> LoadingMatrix:
    """Loadings ``U * sqrt(lambda)`` for all ``n`` factors."""
    lam = np.clip(eig.lam, 0.0, None)
    return LoadingMatrix(eig.U * np.sqrt(lam), tuple(labels))


def common_variance(L: LoadingMatrix) -> CommonVarianceMatrix:
    V = L.L**2
    V.setflags(write=False)
    return CommonVarianceMatrix(V, L.labels, L.factor_names)


def cumulative_variance(V: CommonVarianceMatrix) -> CumulativeVarianceMatrix:
    VC = np.cumsum(V.V, axis=1)
    VC.setflags(write=False)
    return CumulativeVarianceMatrix(VC, V.labels)


def select_factor_count(
    VC: CumulativeVarianceMatrix, epsilon: float = DEFAULT_EPSILON
) -> FactorSelection:
    """Smallest factor count whose worst-represented attribute exceeds ``epsilon``."""
    epsilon = validate_epsilon(epsilon)
    mins = VC.column_min
    for j, m in enumerate(mins):
        if m > epsilon:
            return FactorSelection(j + 1, epsilon, float(m), VC.labels[VC.argmin(j)])
    raise NumericError(
        f"no factor count represents more than {epsilon:.3f} of every attribute "
        f"(best minimum {mins.max():.6f})"
    )


def variance_report(eig: EigenDecomposition, VC: CumulativeVarianceMatrix) -> VarianceReport:
    n = eig.n
    k = VC.VC.shape[1]
    return VarianceReport(
        scree_fraction=tuple(float(x) for x in eig.lam[:k] / n),
        min_var=tuple(float(x) for x in VC.column_min),
        aver_var=tuple(float(x) for x in VC.column_mean),
        min_var_id=tuple(VC.labels[VC.argmin(j)] for j in range(k)),
    )


def reduce(L: LoadingMatrix, nof: int) -> LoadingMatrix:
    if not 1 <= nof <= L.k:
        raise ConfigError(f"factor count must be in 1..{L.k}, got {nof}")
    return LoadingMatrix(L.L[:, :nof], L.labels, L.factor_names[:nof])


def varimax_objective(B: np.ndarray) -> float:
    """``sum_j [ n * sum_i B_ij^4 - (sum_i B_ij^2)^2 ]``."""
    n = B.shape[0]
    sq = B**2
    return float(np.sum(n * np.sum(sq**2, axis=0) - np.sum(sq, axis=0) ** 2))


def _pair_objective(x, y, n):
    x2, y2 = x * x, y * y
    return n * (np.sum(x2 * x2) + np.sum(y2 * y2)) - np.sum(x2) ** 2 - np.sum(y2) ** 2


def _best_angle(x, y, n):
    # Kaiser's closed form: tan(4 phi) = (D - 2AB/n) / (C - (A^2 - B^2)/n)
    u = x * x - y * y
    v = 2.0 * x * y
    A, B = u.sum(), v.sum()
    C = np.sum(u * u - v * v)
    D = 2.0 * np.sum(u * v)
    return np.arctan2(D - 2.0 * A * B / n, C - (A * A - B * B) / n) / 4.0


@dataclass(frozen=True, eq=False)
class VarimaxResult:
    loadings: LoadingMatrix
    rotation: np.ndarray  # loadings.L == L_in @ rotation
    objective: list[float] = field(default_factory=list)  # after each sweep
    sweeps: int = 0
    converged: bool = True


def varimax(
    L: LoadingMatrix,
    tol: float = VARIMAX_TOL,
    max_sweeps: int = VARIMAX_MAX_SWEEPS,
    canonicalize: bool = True,
) -> VarimaxResult:
    """
    Kaiser-normalised Varimax by pairwise planar rotations.

    Rows are scaled to unit length, every factor plane ``(p, q)`` is rotated
    by the angle maximising the criterion on that plane (a rotation that would
    not increase it is skipped), and sweeps repeat until the relative gain of a
    sweep drops below ``tol``. Row lengths are then restored. With
    ``canonicalize`` the factors are afterwards ordered by explained variance
    and signed so each column's largest entry is positive.
    """
    k = L.k
    if k < 2:
        return VarimaxResult(L, np.eye(k), [], 0, True)

    h = np.sqrt(np.sum(L.L**2, axis=1))
    live = h > _ZERO_ROW
    B = L.L[live] / h[live, None]
    n = B.shape[0]
    T = np.eye(k)

    history = [varimax_objective(B)]
    converged = False
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        for p in range(k - 1):
            for q in range(p + 1, k):
                x, y = B[:, p], B[:, q]
                phi = _best_angle(x, y, n)
                c, s = np.cos(phi), np.sin(phi)
                nx, ny = c * x + s * y, -s * x + c * y
                if _pair_objective(nx, ny, n) - _pair_objective(x, y, n) <= 0.0:
                    continue
                B[:, p], B[:, q] = nx, ny
                tp, tq = T[:, p].copy(), T[:, q].copy()
                T[:, p], T[:, q] = c * tp + s * tq, -s * tp + c * tq
        history.append(varimax_objective(B))
        gain = history[-1] - history[-2]
        if gain <= tol * max(abs(history[-2]), 1e-300):
            converged = True
            break

    if not converged:
        warnings.warn(
            f"Varimax did not converge in {max_sweeps} sweeps; using last iterate",
            RuntimeWarning,
            stacklevel=2,
        )

    if canonicalize:
        T = T @ _canonical_permutation(L.L @ T)
    rotated = LoadingMatrix(L.L @ T, L.labels)
    return VarimaxResult(rotated, T, history, sweeps, converged)


def _canonical_permutation(L: np.ndarray) -> np.ndarray:
    """Signed permutation ordering columns by explained variance, largest entry positive."""
    k = L.shape[1]
    explained = np.sum(L**2, axis=0)
    order = np.argsort(-explained, kind="stable")
    P = np.zeros((k, k))
    for new, old in enumerate(order):
        col = np.abs(L[:, old])
        i = int(np.flatnonzero(col >= col.max() - 1e-12)[0])
        P[old, new] = -1.0 if L[i, old] < 0 else 1.0
    return P


def varimax_rotate(L: LoadingMatrix) -> LoadingMatrix:
    return varimax(L).loadings


def simulate_from_factors(L: LoadingMatrix, F) -> np.ndarray:
    """Each row ``f`` of ``F`` (m x k) yields the point ``x`` with ``x^T = L f^T``."""
    F = np.asarray(F, dtype=float)
    if F.ndim != 2 or F.shape[1] != L.k:
        raise NumericError(f"factor matrix must have {L.k} columns, got shape {F.shape}")
    return F @ L.L.T

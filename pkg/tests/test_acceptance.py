"""
Acceptance criteria for the weather reference run and the property suite.

Each test records one line in ``RESULTS``; ``conftest.py`` prints them after
the run so the pass/fail summary is visible without ``-s``.
"""

import json

import numpy as np
import pytest

from attrcluster.cli import main
from attrcluster.cluster import Rule, assign, prune
from attrcluster.correlation import correlation_matrix
from attrcluster.eigen import eigh_symmetric
from attrcluster.encoder import EncodedAttribute, EncodedMatrix, Encoding, Label
from attrcluster.factors import (
    CommonVarianceMatrix,
    LoadingMatrix,
    common_variance,
    full_loadings,
    select_factor_count,
    simulate_from_factors,
    varimax,
    varimax_objective,
)
from attrcluster.pipeline import RunConfig, analyze, prepare
from attrcluster.ranking import rank_with_ties
from helpers import write_csv
from reference import (
    ABSOLUTE_CLUSTERS,
    COMMUNALITY_4,
    CORRELATION,
    EIGENVALUES,
    FULL_VARIANCE,
    RELATIVE_CLUSTERS,
    ROTATED_VARIANCE,
    SHORT_LABELS,
)

RESULTS: dict[int, str] = {}


def record(n, ok, detail):
    RESULTS[n] = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
    assert ok, RESULTS[n]


def idx(label):
    return SHORT_LABELS.index(label)


def labels(n):
    return tuple(Label(f"A{i + 1}", f"c{i}") for i in range(n))


def matrix_of(X):
    X = np.asarray(X, dtype=float)
    return EncodedMatrix(
        tuple(
            EncodedAttribute(lab, X[:, j], j, Encoding.PASSTHROUGH)
            for j, lab in enumerate(labels(X.shape[1]))
        ),
        X.shape[0],
    )


def random_correlation(rng, n):
    A = rng.normal(size=(2 * n, n)) @ rng.normal(size=(n, n))
    return correlation_matrix(matrix_of(A)).R


def naive_correlation(X):
    """Centred cross products over the root of the centred sums of squares, in loops."""
    m, n = X.shape
    cols = [[float(X[r, j]) for r in range(m)] for j in range(n)]
    means = [sum(c) / m for c in cols]
    R = np.empty((n, n))
    for a in range(n):
        for b in range(n):
            sab = sum((cols[a][r] - means[a]) * (cols[b][r] - means[b]) for r in range(m))
            saa = sum((cols[a][r] - means[a]) ** 2 for r in range(m))
            sbb = sum((cols[b][r] - means[b]) ** 2 for r in range(m))
            R[a, b] = sab / (saa**0.5 * sbb**0.5)
    return R


def brute_force_nof(V, epsilon):
    n, k = V.shape
    for j in range(1, k + 1):
        if min(sum(V[i, c] for c in range(j)) for i in range(n)) > epsilon:
            return j
    return None


def test_criterion_1_correlation(weather_fa):
    R = weather_fa.corr.R
    err = np.max(np.abs(R - CORRELATION))
    record(
        1,
        err <= 0.001,
        f"max |R - reference| = {err:.2e} (R(A1>1,A1>3) = {R[idx('A1>1'), idx('A1>3')]:.3f}, "
        f"R(A4,A5) = {R[idx('A4'), idx('A5')]:.3f})",
    )


def test_criterion_2_eigenvalues(weather_fa):
    lam = weather_fa.eig.lam
    err = np.max(np.abs(lam[:7] - EIGENVALUES))
    tail = np.max(lam[7:])
    record(2, err <= 0.01 and lam.size == 10 and tail <= 1e-8,
           f"max eigenvalue error {err:.4f}, largest trailing value {tail:.1e}")


def test_criterion_3_factor_count(weather_fa):
    rep, sel = weather_fa.variances, weather_fa.selection
    aver, minv, who = rep.aver_var[3], rep.min_var[3], rep.min_var_id[3].short
    ok = (
        abs(aver - 0.822) <= 0.005
        and abs(minv - 0.713) <= 0.005
        and who == "A1>3"
        and sel.nof == 4
        and select_factor_count(weather_fa.cumulative, 0.55).nof == 4
    )
    record(3, ok, f"4 factors: AverVar {100 * aver:.1f}%, MinVar {100 * minv:.1f}% ({who}); NoF = {sel.nof}")


def test_criterion_4_common_variance(weather_fa):
    V = weather_fa.variance_full.V
    err = np.max(np.abs(V - FULL_VARIANCE))
    k4 = np.max(np.abs(weather_fa.variance.V - FULL_VARIANCE[:, :4]))
    v = V[idx("A3>1"), 0]
    record(4, err <= 0.005 and k4 <= 0.005, f"max |V - reference| = {err:.4f}, V[A3>1][F1] = {v:.3f}")


def test_criterion_5_rotated_variance(weather_fa):
    V = weather_fa.variance_rotated.V
    err = np.max(np.abs(V - ROTATED_VARIANCE))
    totals = np.max(np.abs(V.sum(axis=1) - weather_fa.variance.V.sum(axis=1)))
    printed = np.max(np.abs(V.sum(axis=1) - COMMUNALITY_4))
    record(
        5,
        err <= 0.01 and totals <= 1e-9 and printed <= 0.005,
        f"max |V - reference| = {err:.4f}, V[A4][F4] = {V[idx('A4'), 3]:.4f}, "
        f"V[A2>2][F2] = {V[idx('A2>2'), 1]:.4f}, row totals moved {totals:.1e}",
    )


def test_criterion_6_clusters(weather_fa):
    ga = weather_fa.graph(Rule.ABSOLUTE)
    gr = weather_fa.graph(Rule.RELATIVE)
    absolute = {f: set(m) for f, m in ga.as_sets().items()}
    relative = {f: set(m) for f, m in gr.as_sets().items()}
    ok = (
        absolute == ABSOLUTE_CLUSTERS
        and relative == RELATIVE_CLUSTERS
        and {a.short for a in ga.unclustered} == {"A2>2", "A4"}
    )
    record(6, ok, f"absolute {sorted((k, sorted(v)) for k, v in absolute.items())}; "
                  f"relative adds {sorted(set().union(*relative.values()) - set().union(*absolute.values()))}")


def test_criterion_7_properties(weather_fa):
    rng = np.random.default_rng(7)
    worst = {k: 0.0 for k in "abcde"}
    objective_drops = 0
    orth = 0.0
    for _ in range(30):
        n = int(rng.integers(3, 11))
        R = random_correlation(rng, n)
        eig = eigh_symmetric(R)
        L = full_loadings(eig, labels(n))
        V = common_variance(L).V
        worst["a"] = max(worst["a"], np.max(np.abs(V.sum(axis=1) - 1)))
        worst["c"] = max(worst["c"], np.max(np.abs(L.L @ L.L.T - R)))
        worst["d"] = max(worst["d"], np.max(np.abs(R @ eig.U - eig.U * eig.lam)))
        orth = max(orth, np.max(np.abs(eig.U.T @ eig.U - np.eye(n))))
        k = int(rng.integers(2, n))
        Lk = LoadingMatrix(L.L[:, :k], L.labels)
        res = varimax(Lk)
        worst["b"] = max(
            worst["b"], np.max(np.abs(np.sum(res.loadings.L**2, 1) - np.sum(Lk.L**2, 1)))
        )
        hist = res.objective
        objective_drops += sum(b < a - 1e-12 for a, b in zip(hist, hist[1:]))

        X = rng.normal(size=(25, n))
        shifted = rng.uniform(-10, 10, n) + rng.uniform(0.1, 10, n) * X
        worst["e"] = max(
            worst["e"],
            np.max(np.abs(correlation_matrix(matrix_of(shifted)).R - correlation_matrix(matrix_of(X)).R)),
        )

    dominance_ok = True
    for _ in range(100):
        n, k = int(rng.integers(3, 15)), int(rng.integers(2, 6))
        L = rng.normal(size=(n, k))
        L *= np.sqrt(rng.uniform(0.05, 1.0, (n, 1))) / np.linalg.norm(L, axis=1, keepdims=True)
        V = CommonVarianceMatrix(L**2, labels(n), tuple(f"F{j + 1}" for j in range(k)))
        ga = prune(assign(V, Rule.ABSOLUTE), V).as_sets()
        gr = prune(assign(V, Rule.RELATIVE), V).as_sets()
        dominance_ok &= all(f in gr and m <= gr[f] for f, m in ga.items())

    rank_ok = True
    for _ in range(100):
        x = rng.integers(-5, 6, int(rng.integers(1, 40)))
        m = x.size
        rank_ok &= abs(rank_with_ties(x).sum() - m * (m + 1) / 2) <= 1e-9

    ok = (
        worst["a"] <= 1e-8
        and worst["b"] <= 1e-9
        and objective_drops == 0
        and worst["c"] <= 1e-8
        and worst["d"] <= 1e-8
        and orth <= 1e-10
        and worst["e"] <= 1e-12
        and dominance_ok
        and rank_ok
    )
    record(
        7, ok,
        "worst deviations " + ", ".join(f"({k}) {v:.1e}" for k, v in worst.items())
        + f"; orthonormality {orth:.1e}; objective drops {objective_drops}; dominance {dominance_ok}; rank sums {rank_ok}",
    )


def _mixed_table(rng, path):
    kinds = rng.permutation(["num", "num", "num", "nom", "nom", "nom"])
    cols = []
    for kind in kinds:
        if kind == "num":
            cols.append([f"{v:.4f}" for v in rng.normal(rng.uniform(-5, 5), rng.uniform(0.5, 3), 30)])
        else:
            p = rng.dirichlet(np.ones(3) * 2)
            cols.append(list(rng.choice(["red", "green", "blue"], 30, p=p)))
    return write_csv(path, [f"c{j}" for j in range(6)], list(zip(*cols)))


def test_criterion_8_oracles(tmp_path):
    rng = np.random.default_rng(8)
    worst_r, scans, mismatches = 0.0, 0, 0
    for t in range(20):
        path = _mixed_table(rng, tmp_path / f"mixed{t}.csv")
        _, _, matrix, _ = prepare(RunConfig(input=path))
        fa = analyze(matrix)
        worst_r = max(worst_r, np.max(np.abs(fa.corr.R - naive_correlation(matrix.values))))
        V = fa.variance_full.V
        for eps in (0.51, 0.55, 0.7, 0.9, 0.99):
            scans += 1
            expected = brute_force_nof(V, eps)
            got = select_factor_count(fa.cumulative, eps).nof if expected else None
            mismatches += got != expected
    record(8, worst_r <= 1e-12 and mismatches == 0,
           f"20 mixed tables: max |R - direct| = {worst_r:.1e}; {mismatches}/{scans} factor-count mismatches")


def test_criterion_9_simulation():
    eig = eigh_symmetric(np.array([[1.0, 0.6], [0.6, 1.0]]))
    L = full_loadings(eig, labels(2))
    F = np.random.default_rng(2024).standard_normal((50_000, 2))
    X = simulate_from_factors(L, F)
    err = np.max(np.abs(np.corrcoef(X, rowvar=False) - L.L @ L.L.T))
    record(9, err <= 0.05, f"k=2, m=50000: max |corr(X) - L L^T| = {err:.4f}")


def test_criterion_10_determinism(weather_csv, tmp_path):
    outs = []
    for name in ("first", "second"):
        out = tmp_path / name
        assert main(["--input", str(weather_csv), "--out", str(out)]) == 0
        outs.append(out)
    names = ["report.json", "graph_absolute.dot", "graph_relative.dot"]
    same = all((outs[0] / f).read_bytes() == (outs[1] / f).read_bytes() for f in names)
    json.loads((outs[0] / "report.json").read_text())
    record(10, same, f"{', '.join(names)} byte-identical across two runs")


@pytest.fixture(scope="module", autouse=True)
def _fresh_results():
    RESULTS.clear()
    yield

"""
End-to-end attribute clustering.

load -> clean -> encode -> (rank) -> correlate -> eigen -> loadings ->
select factor count -> reduce -> varimax -> cluster -> emit
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from . import report as rpt
from .cluster import Rule, SimilarityGraph, assign, cluster_report, prune
from .correlation import (
    CorrelationMatrix,
    DeterminationMatrix,
    correlation_matrix,
    determination_matrix,
)
from .dataset import (
    DEFAULT_MISSING_TOKEN,
    CleaningLog,
    CleanTable,
    ColumnKind,
    MissingPolicy,
    clean,
    infer_kinds,
    load_csv,
    map_values,
)
from .eigen import EigenDecomposition, eigh_symmetric
from .encoder import EncodedMatrix, encode_table, encoding_map
from .errors import AttrClusterError, ConfigError
from .factors import (
    DEFAULT_EPSILON,
    CommonVarianceMatrix,
    CumulativeVarianceMatrix,
    FactorSelection,
    LoadingMatrix,
    VarianceReport,
    VarimaxResult,
    common_variance,
    cumulative_variance,
    full_loadings,
    reduce,
    select_factor_count,
    validate_epsilon,
    variance_report,
    varimax,
)
from .ranking import apply_ranking, select_rankable

FORMATS = ("dot", "graphml", "json")
RULES = ("absolute", "relative", "both")


@dataclass(frozen=True)
class RunConfig:
    input: Path
    out: Path = Path(".")
    missing_token: str = DEFAULT_MISSING_TOKEN
    missing_policy: MissingPolicy = field(default_factory=MissingPolicy)
    kind_overrides: Mapping[str, ColumnKind] = field(default_factory=dict)
    value_maps: Mapping[str, Mapping[str, str]] = field(default_factory=dict)
    rank: bool = False
    epsilon: float = DEFAULT_EPSILON
    rule: str = "both"
    formats: tuple[str, ...] = ("dot", "json")
    labels: str = "full"
    dump_tables: bool = False
    include_singletons: bool = False
    delimiter: str = ","
    generated_at: str | None = None  # only source of wall-clock data in outputs

    def __post_init__(self):
        if self.input is None or str(self.input) == "":
            raise ConfigError("an input path is required")
        validate_epsilon(self.epsilon)
        if self.rule not in RULES:
            raise ConfigError(f"rule must be one of {RULES}, got {self.rule!r}")
        bad = [f for f in self.formats if f not in FORMATS]
        if bad or not self.formats:
            raise ConfigError(f"output formats must be drawn from {FORMATS}, got {bad}")
        if self.labels not in ("short", "full"):
            raise ConfigError(f"labels must be 'short' or 'full', got {self.labels!r}")

    @property
    def rules(self) -> tuple[Rule, ...]:
        if self.rule == "both":
            return (Rule.ABSOLUTE, Rule.RELATIVE)
        return (Rule(self.rule),)

    def echo(self) -> dict:
        return {
            "input": Path(self.input).name,
            "missing_token": self.missing_token,
            "missing_policy": str(self.missing_policy),
            "kind_overrides": {k: ColumnKind(v).value for k, v in sorted(self.kind_overrides.items())},
            "value_maps": {k: dict(sorted(v.items())) for k, v in sorted(self.value_maps.items())},
            "rank": self.rank,
            "epsilon": self.epsilon,
            "rule": self.rule,
            "labels": self.labels,
            "include_singletons": self.include_singletons,
        }


@dataclass(frozen=True, eq=False)
class FactorAnalysis:
    """Every intermediate of the factor model for one encoded matrix."""

    matrix: EncodedMatrix
    corr: CorrelationMatrix
    determination: DeterminationMatrix
    eig: EigenDecomposition
    loadings_full: LoadingMatrix
    variance_full: CommonVarianceMatrix
    cumulative: CumulativeVarianceMatrix
    variances: VarianceReport
    selection: FactorSelection
    loadings: LoadingMatrix
    variance: CommonVarianceMatrix
    rotation: VarimaxResult
    variance_rotated: CommonVarianceMatrix

    def graph(self, rule: Rule | str, include_singletons: bool = False) -> SimilarityGraph:
        return prune(assign(self.variance_rotated, rule), self.variance_rotated, include_singletons)


@contextlib.contextmanager
def stage(name: str):
    """Prefix errors raised inside the block with the pipeline stage name."""
    try:
        yield
    except AttrClusterError as exc:
        if not str(exc).startswith("["):
            raise type(exc)(f"[{name}] {exc}") from exc
        raise


def analyze(matrix: EncodedMatrix, epsilon: float = DEFAULT_EPSILON) -> FactorAnalysis:
    with stage("correlation"):
        corr = correlation_matrix(matrix)
        det = determination_matrix(corr)
    with stage("eigen"):
        eig = eigh_symmetric(corr)
    with stage("factors"):
        L = full_loadings(eig, matrix.labels)
        V = common_variance(L)
        VC = cumulative_variance(V)
        sel = select_factor_count(VC, epsilon)
        Lk = reduce(L, sel.nof)
        rot = varimax(Lk)
    return FactorAnalysis(
        matrix=matrix,
        corr=corr,
        determination=det,
        eig=eig,
        loadings_full=L,
        variance_full=V,
        cumulative=VC,
        variances=variance_report(eig, VC),
        selection=sel,
        loadings=Lk,
        variance=common_variance(Lk),
        rotation=rot,
        variance_rotated=common_variance(rot.loadings),
    )


def prepare(config: RunConfig) -> tuple[CleanTable, CleaningLog, EncodedMatrix, list[int]]:
    with stage("load"):
        raw = load_csv(config.input, config.missing_token, config.delimiter)
        for column, mapping in config.value_maps.items():
            raw = map_values(raw, column, mapping)
    with stage("clean"):
        kinds = infer_kinds(raw, config.kind_overrides)
        table, log = clean(raw, kinds, config.missing_policy)
    with stage("encode"):
        matrix = encode_table(table)
    ranked: list[int] = []
    if config.rank:
        with stage("rank"):
            ranked = select_rankable(matrix)
            matrix = apply_ranking(matrix)
    return table, log, matrix, ranked


def build_report(
    config: RunConfig,
    table: CleanTable,
    log: CleaningLog,
    ranked: list[int],
    fa: FactorAnalysis,
    graphs: Mapping[Rule, SimilarityGraph],
) -> rpt.RunReport:
    labels = fa.matrix.labels
    full_names = list(fa.loadings_full.factor_names)
    k_names = list(fa.loadings.factor_names)
    vr = fa.variances
    metadata = {"generated_at": config.generated_at} if config.generated_at else {}
    return rpt.RunReport(
        config=config.echo(),
        cleaning=log.to_dict(),
        encoding=encoding_map(table, fa.matrix),
        ranked_columns=[labels[j].short for j in ranked],
        correlation=rpt.matrix_to_dict(fa.corr.R, labels, [lab.full for lab in labels]),
        determination=rpt.matrix_to_dict(fa.determination.D, labels, [lab.full for lab in labels]),
        eigenvalues=list(fa.eig.lam),
        variance_report={
            "scree_fraction": list(vr.scree_fraction),
            "min_var": list(vr.min_var),
            "aver_var": list(vr.aver_var),
            "min_var_id": [lab.short for lab in vr.min_var_id],
            "min_var_id_full": [lab.full for lab in vr.min_var_id],
        },
        selection={
            "nof": fa.selection.nof,
            "epsilon": fa.selection.epsilon,
            "min_var": fa.selection.min_var,
            "min_var_id": fa.selection.min_var_attribute.short,
        },
        common_variance_full=rpt.matrix_to_dict(fa.variance_full.V, labels, full_names),
        loadings=rpt.matrix_to_dict(fa.loadings.L, labels, k_names),
        common_variance=rpt.matrix_to_dict(fa.variance.V, labels, k_names),
        loadings_rotated=rpt.matrix_to_dict(fa.rotation.loadings.L, labels, k_names),
        common_variance_rotated=rpt.matrix_to_dict(fa.variance_rotated.V, labels, k_names),
        rotation={
            "sweeps": fa.rotation.sweeps,
            "converged": fa.rotation.converged,
            "objective": fa.rotation.objective[-1] if fa.rotation.objective else None,
            "matrix": fa.rotation.rotation.tolist(),
        },
        clusters={rule.value: cluster_report(g) for rule, g in graphs.items()},
        metadata=metadata,
    )


@dataclass(frozen=True, eq=False)
class RunResult:
    report: rpt.RunReport
    analysis: FactorAnalysis
    graphs: dict
    written: list


def _table_dumps(fa: FactorAnalysis, mode: str) -> dict[str, list]:
    labels = fa.matrix.labels
    cols = [lab.get(mode) for lab in labels]
    full_names = list(fa.loadings_full.factor_names)
    k_names = list(fa.loadings.factor_names)
    return {
        "encoded.csv": [cols, *fa.matrix.values.tolist()],
        "correlation.csv": rpt.matrix_rows(fa.corr.R, labels, cols, mode),
        "determination.csv": rpt.matrix_rows(fa.determination.D, labels, cols, mode),
        "eigenvalues.csv": [["factor", "eigenvalue"]]
        + [[j + 1, float(v)] for j, v in enumerate(fa.eig.lam)],
        "eigenvectors.csv": rpt.matrix_rows(fa.eig.U, labels, [f"V{j + 1}" for j in range(fa.eig.n)], mode),
        "loadings_full.csv": rpt.matrix_rows(fa.loadings_full.L, labels, full_names, mode),
        "common_variance_full.csv": rpt.matrix_rows(fa.variance_full.V, labels, full_names, mode),
        "cumulative_variance.csv": rpt.matrix_rows(fa.cumulative.VC, labels, full_names, mode),
        "loadings.csv": rpt.matrix_rows(fa.loadings.L, labels, k_names, mode),
        "common_variance.csv": rpt.matrix_rows(fa.variance.V, labels, k_names, mode),
        "loadings_rotated.csv": rpt.matrix_rows(fa.rotation.loadings.L, labels, k_names, mode),
        "common_variance_rotated.csv": rpt.matrix_rows(fa.variance_rotated.V, labels, k_names, mode),
    }


def run_pipeline(config: RunConfig) -> RunResult:
    table, log, matrix, ranked = prepare(config)
    fa = analyze(matrix, config.epsilon)
    with stage("cluster"):
        graphs = {rule: fa.graph(rule, config.include_singletons) for rule in config.rules}
    report = build_report(config, table, log, ranked, fa, graphs)

    out = Path(config.out)
    written = []
    with stage("emit"):
        if "json" in config.formats:
            written.append(rpt.emit_json(report, out / "report.json"))
        for rule, graph in graphs.items():
            if "dot" in config.formats:
                written.append(rpt.emit_dot(graph, out / f"graph_{rule.value}.dot", config.labels))
            if "graphml" in config.formats:
                written.append(
                    rpt.emit_graphml(graph, out / f"graph_{rule.value}.graphml", config.labels)
                )
        written.append(
            rpt.emit_csv(fa.variances.rows(config.labels), out / "variance_report.csv")
        )
        if config.dump_tables:
            for name, rows in _table_dumps(fa, config.labels).items():
                written.append(rpt.emit_csv(rows, out / "tables" / name))
    return RunResult(report, fa, graphs, written)

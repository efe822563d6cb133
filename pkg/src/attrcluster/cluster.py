"""
Grouping attributes by the factor that reproduces the majority of their variance.

Under the absolute rule attribute ``i`` is similar to factor ``j`` when
``V[i, j] > 0.5``. Under the relative rule the bar is half of the variance the
retained factors reproduce for that attribute, ``V[i, j] > 0.5 * sum_j V[i, j]``.
Both are strict, so at most one factor can qualify per attribute.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .encoder import Label
from .factors import CommonVarianceMatrix

# exact ties with the threshold are reported when closer than this
_TIE_ATOL = 1e-12


class Rule(str, enum.Enum):
    ABSOLUTE = "absolute"
    RELATIVE = "relative"


@dataclass(frozen=True)
class SimilarityAssignment:
    attribute: Label
    attribute_index: int
    factor: str
    factor_index: int
    shared_variance: float
    row_total: float
    rule: Rule


@dataclass(frozen=True)
class Assignment:
    rule: Rule
    assigned: tuple[SimilarityAssignment, ...]
    unassigned: tuple[Label, ...]
    at_threshold: tuple[Label, ...] = ()


@dataclass(frozen=True)
class Cluster:
    factor: str
    factor_index: int
    members: tuple[SimilarityAssignment, ...]


@dataclass(frozen=True)
class SimilarityGraph:
    rule: Rule
    clusters: tuple[Cluster, ...]
    unclustered: tuple[Label, ...]
    pruned_factors: tuple[str, ...]
    at_threshold: tuple[Label, ...] = ()

    @property
    def factor_nodes(self) -> list[str]:
        return [c.factor for c in self.clusters]

    @property
    def edges(self) -> list[SimilarityAssignment]:
        return [m for c in self.clusters for m in c.members]

    def as_sets(self, label_mode: str = "short") -> dict[str, frozenset[str]]:
        return {
            c.factor: frozenset(m.attribute.get(label_mode) for m in c.members)
            for c in self.clusters
        }


def assign(V: CommonVarianceMatrix, rule: Rule | str) -> Assignment:
    rule = Rule(rule)
    totals = V.row_total
    assigned, unassigned, ties = [], [], []
    for i, label in enumerate(V.labels):
        row = V.V[i]
        bar = 0.5 if rule is Rule.ABSOLUTE else 0.5 * totals[i]
        hits = np.flatnonzero(row > bar)
        if hits.size:
            j = int(hits[0])
            assigned.append(
                SimilarityAssignment(
                    label, i, V.factor_names[j], j, float(row[j]), float(totals[i]), rule
                )
            )
        else:
            unassigned.append(label)
            if np.any(np.abs(row - bar) <= _TIE_ATOL):
                ties.append(label)
    return Assignment(rule, tuple(assigned), tuple(unassigned), tuple(ties))


def prune(
    assignment: Assignment, V: CommonVarianceMatrix, include_singletons: bool = False
) -> SimilarityGraph:
    """Keep factors with at least two similar attributes (or one, with ``include_singletons``)."""
    minimum = 1 if include_singletons else 2
    clusters, pruned = [], []
    kept_attrs = set()
    for j, name in enumerate(V.factor_names):
        members = tuple(a for a in assignment.assigned if a.factor_index == j)
        if len(members) >= minimum:
            clusters.append(Cluster(name, j, members))
            kept_attrs.update(a.attribute_index for a in members)
        else:
            pruned.append(name)
    unclustered = tuple(
        label for i, label in enumerate(V.labels) if i not in kept_attrs
    )
    return SimilarityGraph(
        assignment.rule, tuple(clusters), unclustered, tuple(pruned), assignment.at_threshold
    )


def cluster_report(graph: SimilarityGraph) -> dict:
    return {
        "rule": graph.rule.value,
        "clusters": [
            {
                "factor": c.factor,
                "members": [
                    {
                        "short": m.attribute.short,
                        "full": m.attribute.full,
                        "shared_variance": m.shared_variance,
                        "row_total": m.row_total,
                    }
                    for m in c.members
                ],
            }
            for c in graph.clusters
        ],
        "unclustered": [{"short": a.short, "full": a.full} for a in graph.unclustered],
        "pruned_factors": list(graph.pruned_factors),
        "at_threshold": [{"short": a.short, "full": a.full} for a in graph.at_threshold],
    }

"""Tied-rank transform of encoded columns."""

from __future__ import annotations

import dataclasses

import numpy as np

from .encoder import EncodedMatrix, Encoding
from .errors import DataError


def rank_with_ties(values) -> np.ndarray:
    """
    Replace each value by its 1-based position in the sorted data.

    Equal values share the mean of the positions they occupy, so
    ``[44, 44, 44]`` sitting at positions 3..5 all get rank 4.
    The result is aligned with the input order.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DataError("rank_with_ties expects a non-empty 1-d vector")
    if not np.all(np.isfinite(x)):
        raise DataError("cannot rank non-finite values")

    order = np.argsort(x, kind="stable")
    xs = x[order]
    ranks_sorted = np.empty(x.size)
    start = 0
    while start < x.size:
        stop = start + 1
        while stop < x.size and xs[stop] == xs[start]:
            stop += 1
        # positions start+1 .. stop, mean = (start + 1 + stop) / 2
        ranks_sorted[start:stop] = (start + 1 + stop) / 2.0
        start = stop

    ranks = np.empty(x.size)
    ranks[order] = ranks_sorted
    return ranks


def is_dichotomous(values) -> bool:
    return np.unique(np.asarray(values)).size == 2


def select_rankable(matrix: EncodedMatrix) -> list[int]:
    """Columns that ranking can change: not one-hot and with more than two values."""
    return [
        j
        for j, a in enumerate(matrix.attributes)
        if a.encoding is not Encoding.ONE_HOT and np.unique(a.values).size > 2
    ]


def apply_ranking(matrix: EncodedMatrix) -> EncodedMatrix:
    selected = set(select_rankable(matrix))
    attributes = tuple(
        dataclasses.replace(a, values=rank_with_ties(a.values)) if j in selected else a
        for j, a in enumerate(matrix.attributes)
    )
    return EncodedMatrix(attributes, matrix.n_rows)

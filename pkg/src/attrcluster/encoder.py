"""
Numeric encoding of nominal attributes.

A nominal attribute whose classes all have distinct sizes is replaced by the
class cardinalities (a value belonging to a class of ``n`` rows becomes
``n``). That is an affine image of the tied-rank ``(n + 1) / 2`` and so yields
the same correlations. When two or more classes share a cardinality they would
collapse to one number, so the whole attribute is one-hot encoded instead.

Encoded columns are labelled ``Ak`` (numeric or cardinality encoded source
column ``k``) or ``Ak>m`` (indicator of the ``m``-th class of column ``k``),
together with the human readable ``name`` / ``name>value`` forms.
"""

from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import CleanTable, ColumnKind
from .errors import DataError

SHORT_LABEL_RE = re.compile(r"^A[1-9][0-9]*(>[1-9][0-9]*)?$")


class Encoding(str, enum.Enum):
    PASSTHROUGH = "passthrough"
    CARDINALITY = "cardinality"
    ONE_HOT = "one-hot"


@dataclass(frozen=True)
class ClassStats:
    value: str
    cardinality: int
    class_index: int


@dataclass(frozen=True)
class Label:
    short: str
    full: str

    def get(self, mode: str) -> str:
        return self.full if mode == "full" else self.short


@dataclass(frozen=True, eq=False)
class EncodedAttribute:
    label: Label
    values: np.ndarray
    origin: int
    encoding: Encoding
    origin_class: ClassStats | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.size and np.all(values == values[0]):
            raise DataError(f"encoded column {self.label.full!r} is constant")

    @property
    def short_label(self) -> str:
        return self.label.short

    @property
    def full_label(self) -> str:
        return self.label.full

    def __eq__(self, other):
        if not isinstance(other, EncodedAttribute):
            return NotImplemented
        return (
            self.label == other.label
            and self.origin == other.origin
            and self.encoding == other.encoding
            and self.origin_class == other.origin_class
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True)
class EncodedMatrix:
    attributes: tuple[EncodedAttribute, ...]
    n_rows: int

    def __post_init__(self):
        shorts = [a.label.short for a in self.attributes]
        fulls = [a.label.full for a in self.attributes]
        if len(set(shorts)) != len(shorts) or len(set(fulls)) != len(fulls):
            raise DataError("encoded attribute labels are not unique")
        for a in self.attributes:
            if a.values.shape != (self.n_rows,):
                raise DataError(f"column {a.label.full!r} has wrong length")

    @property
    def n_cols(self) -> int:
        return len(self.attributes)

    @property
    def labels(self) -> tuple[Label, ...]:
        return tuple(a.label for a in self.attributes)

    @property
    def values(self) -> np.ndarray:
        """``n_rows x n_cols`` array of encoded values."""
        if not self.attributes:
            return np.empty((self.n_rows, 0))
        return np.column_stack([a.values for a in self.attributes])


def class_cardinalities(column: Sequence[str]) -> list[ClassStats]:
    """Class sizes, numbered by order of first appearance."""
    counts = Counter(column)
    order = dict.fromkeys(column)
    return [
        ClassStats(value, counts[value], index)
        for index, value in enumerate(order, start=1)
    ]


def has_equicardinal_classes(stats: Sequence[ClassStats]) -> bool:
    sizes = [s.cardinality for s in stats]
    return len(set(sizes)) != len(sizes)


def encode_cardinality(
    column: Sequence[str],
    stats: Sequence[ClassStats],
    origin: int = 0,
    name: str = "",
) -> EncodedAttribute:
    if has_equicardinal_classes(stats):
        raise DataError(
            f"column {name or origin + 1!r} has equicardinal classes; "
            "cardinality encoding would merge them"
        )
    size = {s.value: s.cardinality for s in stats}
    label = Label(f"A{origin + 1}", name or f"A{origin + 1}")
    values = np.array([size[v] for v in column], dtype=float)
    return EncodedAttribute(label, values, origin, Encoding.CARDINALITY)


def encode_one_hot(
    column: Sequence[str],
    stats: Sequence[ClassStats],
    origin: int = 0,
    name: str = "",
) -> list[EncodedAttribute]:
    if len(stats) < 2:
        raise DataError(f"column {name or origin + 1!r}: one-hot needs >= 2 classes")
    name = name or f"A{origin + 1}"
    cells = np.asarray(column, dtype=object)
    out = []
    for s in sorted(stats, key=lambda s: s.class_index):
        label = Label(f"A{origin + 1}>{s.class_index}", f"{name}>{s.value}")
        values = (cells == s.value).astype(float)
        out.append(EncodedAttribute(label, values, origin, Encoding.ONE_HOT, s))
    return out


def encode_table(table: CleanTable) -> EncodedMatrix:
    attributes: list[EncodedAttribute] = []
    for k, col in enumerate(table.columns):
        if col.kind is ColumnKind.NUMERIC:
            label = Label(f"A{k + 1}", col.name)
            attributes.append(
                EncodedAttribute(label, np.array(col.values, float), k, Encoding.PASSTHROUGH)
            )
            continue
        stats = class_cardinalities(col.values)
        if has_equicardinal_classes(stats):
            attributes.extend(encode_one_hot(col.values, stats, k, col.name))
        else:
            attributes.append(encode_cardinality(col.values, stats, k, col.name))
    return EncodedMatrix(tuple(attributes), table.n_rows)


def encoding_map(table: CleanTable, matrix: EncodedMatrix) -> list[dict]:
    """Per source column: its kind, encoding, class sizes and encoded labels."""
    out = []
    for k, col in enumerate(table.columns):
        attrs = [a for a in matrix.attributes if a.origin == k]
        entry = {
            "column": col.name,
            "kind": col.kind.value,
            "encoding": attrs[0].encoding.value if attrs else None,
            "labels": [{"short": a.label.short, "full": a.label.full} for a in attrs],
        }
        if col.kind is ColumnKind.NOMINAL:
            entry["classes"] = [
                {"value": s.value, "cardinality": s.cardinality, "index": s.class_index}
                for s in class_cardinalities(col.values)
            ]
        out.append(entry)
    return out

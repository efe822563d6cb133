"""
Loading, typing and cleaning of tabular input.

A CSV file is read verbatim into a :class:`RawTable`. Column kinds are then
inferred (with optional user overrides) and :func:`clean` applies the
missing-value policy and drops constant columns, producing a
:class:`CleanTable` that the encoder can consume.
"""

from __future__ import annotations

import csv
import enum
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .errors import ConfigError, DataError

DEFAULT_MISSING_TOKEN = "?"
DEFAULT_DROP_COLUMNS_THRESHOLD = 0.2

# integer and plain decimal forms only: no exponents, inf, nan or separators
_NUMBER_RE = re.compile(r"^[+-]?(?:\d+(?:\.\d*)?|\.\d+)$")


class ColumnKind(str, enum.Enum):
    NUMERIC = "numeric"
    NOMINAL = "nominal"


def parse_number(token: str) -> float | None:
    """Return the float value of ``token`` or None if it is not a number."""
    token = token.strip()
    if not _NUMBER_RE.match(token):
        return None
    value = float(token)
    return value if math.isfinite(value) else None


@dataclass(frozen=True)
class RawTable:
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    missing_token: str = DEFAULT_MISSING_TOKEN

    def __post_init__(self):
        if len(set(self.header)) != len(self.header):
            dupes = sorted({h for h in self.header if self.header.count(h) > 1})
            raise DataError(f"duplicate column names: {', '.join(dupes)}")
        for i, row in enumerate(self.rows):
            if len(row) != len(self.header):
                raise DataError(
                    f"row {i + 1} has {len(row)} cells, expected {len(self.header)}"
                )

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.header)

    def column(self, j: int) -> list[str]:
        return [row[j] for row in self.rows]

    def index_of(self, name: str) -> int:
        try:
            return self.header.index(name)
        except ValueError:
            raise ConfigError(f"unknown column {name!r}") from None


def load_csv(
    path: str | Path,
    missing_token: str = DEFAULT_MISSING_TOKEN,
    delimiter: str = ",",
) -> RawTable:
    """Read a headed CSV file into a :class:`RawTable` without interpreting cells."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            records = list(csv.reader(fh, delimiter=delimiter))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    # blank trailing lines are not rows
    while records and not any(cell.strip() for cell in records[-1]):
        records.pop()
    if not records:
        raise DataError(f"{path}: no header")

    header = tuple(cell.strip() for cell in records[0])
    rows = []
    for lineno, record in enumerate(records[1:], start=2):
        if len(record) != len(header):
            raise DataError(
                f"{path}: line {lineno} has {len(record)} cells, "
                f"expected {len(header)}"
            )
        rows.append(tuple(cell.strip() for cell in record))
    return RawTable(header, tuple(rows), missing_token)


def map_values(table: RawTable, column: str, mapping: Mapping[str, str]) -> RawTable:
    """Replace tokens of one column, e.g. to recode ordinal labels as integers."""
    j = table.index_of(column)
    rows = tuple(
        row[:j] + (mapping.get(row[j], row[j]),) + row[j + 1 :] for row in table.rows
    )
    return RawTable(table.header, rows, table.missing_token)


def infer_kinds(
    table: RawTable, overrides: Mapping[str, ColumnKind] | None = None
) -> list[ColumnKind]:
    """Numeric iff every non-missing cell parses as a finite number; overrides win."""
    overrides = dict(overrides or {})
    unknown = set(overrides) - set(table.header)
    if unknown:
        raise ConfigError(f"kind override for unknown column(s): {sorted(unknown)}")

    kinds = []
    for j, name in enumerate(table.header):
        present = [c for c in table.column(j) if c != table.missing_token]
        bad = [c for c in present if parse_number(c) is None]
        requested = overrides.get(name)
        if requested is not None:
            requested = ColumnKind(requested)
            if requested is ColumnKind.NUMERIC and bad:
                raise DataError(
                    f"column {name!r} forced numeric but has non-numeric "
                    f"value {bad[0]!r}"
                )
            kinds.append(requested)
        else:
            kinds.append(ColumnKind.NOMINAL if bad else ColumnKind.NUMERIC)
    return kinds


@dataclass(frozen=True)
class MissingPolicy:
    """``drop-rows`` or ``drop-cols`` (columns missing more than ``threshold``)."""

    mode: str = "drop-rows"
    threshold: float = DEFAULT_DROP_COLUMNS_THRESHOLD

    def __post_init__(self):
        if self.mode not in ("drop-rows", "drop-cols"):
            raise ConfigError(f"unknown missing policy {self.mode!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"drop-cols threshold must be in [0, 1], got {self.threshold}")

    @classmethod
    def parse(cls, text: str) -> MissingPolicy:
        mode, _, arg = text.partition(":")
        if mode == "drop-rows":
            if arg:
                raise ConfigError("drop-rows takes no threshold")
            return cls("drop-rows")
        if mode == "drop-cols":
            if not arg:
                return cls("drop-cols")
            try:
                return cls("drop-cols", float(arg))
            except ValueError:
                raise ConfigError(f"bad drop-cols threshold {arg!r}") from None
        raise ConfigError(f"unknown missing policy {text!r}")

    def __str__(self):
        if self.mode == "drop-cols":
            return f"drop-cols:{self.threshold:g}"
        return self.mode


@dataclass(frozen=True)
class Column:
    name: str
    kind: ColumnKind
    values: tuple  # floats for numeric columns, str for nominal


@dataclass(frozen=True)
class CleaningLog:
    dropped_rows: tuple[int, ...] = ()
    dropped_missing_columns: tuple[str, ...] = ()
    dropped_constant_columns: tuple[str, ...] = ()
    n_rows_in: int = 0
    n_rows_out: int = 0

    def to_dict(self) -> dict:
        return {
            "n_rows_in": self.n_rows_in,
            "n_rows_out": self.n_rows_out,
            "dropped_rows": list(self.dropped_rows),
            "dropped_missing_columns": list(self.dropped_missing_columns),
            "dropped_constant_columns": list(self.dropped_constant_columns),
        }


@dataclass(frozen=True)
class CleanTable:
    columns: tuple[Column, ...]
    n_rows: int
    missing_token: str = DEFAULT_MISSING_TOKEN
    source_rows: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.n_rows < 2:
            raise DataError(f"need at least 2 complete rows, got {self.n_rows}")
        if not self.columns:
            raise DataError("no usable columns left after cleaning")
        for col in self.columns:
            if len(col.values) != self.n_rows:
                raise DataError(f"column {col.name!r} has wrong length")
            if len(set(col.values)) < 2:
                raise DataError(f"column {col.name!r} is constant")
            if col.kind is ColumnKind.NOMINAL and self.missing_token in col.values:
                raise DataError(f"column {col.name!r} still has missing cells")

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    @property
    def kinds(self) -> list[ColumnKind]:
        return [c.kind for c in self.columns]

    def to_raw(self) -> RawTable:
        """Render back to string tokens (numeric values via ``repr``)."""
        cols = [
            [repr(v) if c.kind is ColumnKind.NUMERIC else v for v in c.values]
            for c in self.columns
        ]
        rows = tuple(zip(*cols)) if cols else ()
        return RawTable(tuple(self.names), tuple(rows), self.missing_token)


def clean(
    table: RawTable,
    kinds: Sequence[ColumnKind],
    policy: MissingPolicy | None = None,
) -> tuple[CleanTable, CleaningLog]:
    """Apply the missing-value policy, then drop constant columns."""
    policy = policy or MissingPolicy()
    if len(kinds) != table.n_cols:
        raise ConfigError(f"got {len(kinds)} kinds for {table.n_cols} columns")
    miss = table.missing_token

    keep_cols = list(range(table.n_cols))
    dropped_missing = []
    if policy.mode == "drop-cols" and table.n_rows:
        for j in list(keep_cols):
            frac = sum(c == miss for c in table.column(j)) / table.n_rows
            if frac > policy.threshold:
                keep_cols.remove(j)
                dropped_missing.append(table.header[j])

    keep_rows, dropped_rows = [], []
    for i, row in enumerate(table.rows):
        if any(row[j] == miss for j in keep_cols):
            dropped_rows.append(i)
        else:
            keep_rows.append(i)

    columns, dropped_constant = [], []
    for j in keep_cols:
        cells = [table.rows[i][j] for i in keep_rows]
        if kinds[j] is ColumnKind.NUMERIC:
            values = []
            for i, cell in zip(keep_rows, cells):
                v = parse_number(cell)
                if v is None:
                    raise DataError(
                        f"column {table.header[j]!r}, row {i + 1}: "
                        f"{cell!r} is not a number"
                    )
                values.append(v)
        else:
            values = cells
        if len(set(values)) < 2:
            dropped_constant.append(table.header[j])
            continue
        columns.append(Column(table.header[j], ColumnKind(kinds[j]), tuple(values)))

    log = CleaningLog(
        dropped_rows=tuple(dropped_rows),
        dropped_missing_columns=tuple(dropped_missing),
        dropped_constant_columns=tuple(dropped_constant),
        n_rows_in=table.n_rows,
        n_rows_out=len(keep_rows),
    )
    return CleanTable(tuple(columns), len(keep_rows), miss, tuple(keep_rows)), log

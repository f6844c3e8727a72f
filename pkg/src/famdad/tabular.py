"""Mixed continuous/categorical tables, schemas and CSV ingestion."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class TableError(ValueError):
    """Raised for malformed input files or inconsistent tables."""


class ColumnKind(str, enum.Enum):
    CONTINUOUS = "continuous"
    CATEGORICAL = "categorical"
    LABEL = "label"
    IGNORE = "ignore"


@dataclass(frozen=True)
class Schema:
    """Ordered ``(name, kind)`` pairs, one per CSV column."""

    columns: tuple[tuple[str, ColumnKind], ...]

    def __post_init__(self) -> None:
        names = [name for name, _ in self.columns]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise TableError(f"duplicate column names in schema: {dupes}")
        labels = [name for name, kind in self.columns if kind is ColumnKind.LABEL]
        if len(labels) > 1:
            raise TableError(f"at most one label column allowed, got {labels}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, ColumnKind | str]]) -> Schema:
        return cls(tuple((name, ColumnKind(kind)) for name, kind in pairs))

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.columns]

    def kind_of(self, name: str) -> ColumnKind:
        return dict(self.columns)[name]


@dataclass(frozen=True)
class ContinuousColumn:
    name: str
    values: np.ndarray


@dataclass(frozen=True)
class CategoricalColumn:
    """A categorical variable stored as level codes into ``levels``."""

    name: str
    levels: tuple[str, ...]
    codes: np.ndarray

    @classmethod
    def from_values(cls, name: str, values: Sequence[object]) -> CategoricalColumn:
        """Build a column with levels in first-appearance order."""
        index: dict[str, int] = {}
        codes = np.empty(len(values), dtype=np.int64)
        for i, v in enumerate(values):
            key = str(v)
            code = index.get(key)
            if code is None:
                code = index[key] = len(index)
            codes[i] = code
        return cls(name, tuple(index), codes)

    def pruned(self) -> CategoricalColumn:
        """Drop unused levels, renumbering codes in first-appearance order."""
        return CategoricalColumn.from_values(self.name, [self.levels[c] for c in self.codes])

    @property
    def n_levels(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class MixedTable:
    """Immutable mixed-type table.

    Labels (``True`` = anomaly) are carried for evaluation only; nothing in
    the encode/embed/score stages reads them.
    """

    continuous: tuple[ContinuousColumn, ...] = ()
    categorical: tuple[CategoricalColumn, ...] = ()
    labels: np.ndarray | None = None
    n: int = field(init=False)

    def __post_init__(self) -> None:
        cont = tuple(
            ContinuousColumn(c.name, _readonly(np.asarray(c.values, dtype=np.float64)))
            for c in self.continuous
        )
        cats = []
        for c in self.categorical:
            codes = np.asarray(c.codes, dtype=np.int64)
            if codes.size and (codes.min() < 0 or codes.max() >= len(c.levels)):
                raise TableError(f"column {c.name!r}: level code out of range")
            col = CategoricalColumn(c.name, tuple(c.levels), codes)
            if len(np.unique(codes)) != len(col.levels):
                col = col.pruned()
            cats.append(CategoricalColumn(col.name, col.levels, _readonly(col.codes)))
        lengths = {len(c.values) for c in cont} | {len(c.codes) for c in cats}
        labels = self.labels
        if labels is not None:
            labels = _readonly(np.asarray(labels, dtype=bool))
            lengths.add(len(labels))
        if len(lengths) > 1:
            raise TableError(f"columns have unequal lengths: {sorted(lengths)}")
        names = [c.name for c in cont] + [c.name for c in cats]
        if len(set(names)) != len(names):
            raise TableError("column names must be unique")
        object.__setattr__(self, "continuous", cont)
        object.__setattr__(self, "categorical", tuple(cats))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "n", lengths.pop() if lengths else 0)

    @property
    def n_continuous(self) -> int:
        return len(self.continuous)

    @property
    def n_categorical(self) -> int:
        return len(self.categorical)

    def continuous_matrix(self) -> np.ndarray:
        if not self.continuous:
            return np.empty((self.n, 0))
        return np.column_stack([c.values for c in self.continuous])

    def without_labels(self) -> MixedTable:
        return MixedTable(self.continuous, self.categorical, None)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# schema files

def read_schema(path: str | Path) -> Schema:
    """Parse a ``name=kind`` per line schema file (``#`` starts a comment)."""
    path = Path(path)
    if not path.is_file():
        raise TableError(f"schema file not found: {path}")
    pairs = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, kind = line.rpartition("=")
        if not sep or not name.strip():
            raise TableError(f"{path}:{lineno}: expected 'name=kind', got {raw!r}")
        try:
            pairs.append((name.strip(), ColumnKind(kind.strip().lower())))
        except ValueError:
            raise TableError(f"{path}:{lineno}: unknown column kind {kind.strip()!r}") from None
    return Schema(tuple(pairs))


def write_schema(schema: Schema, path: str | Path) -> None:
    lines = [f"{name}={kind.value}" for name, kind in schema.columns]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# CSV

_LABEL_VALUES = {"0": False, "1": True, "false": False, "true": True}


def _is_float(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _read_rows(path: Path) -> tuple[list[str], list[list[str]]]:
    if not path.is_file():
        raise TableError(f"file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TableError(f"{path}: missing header row") from None
        rows = [row for row in reader if row]
    for i, row in enumerate(rows, 1):
        if len(row) != len(header):
            raise TableError(f"{path}: row {i} has {len(row)} cells, header has {len(header)}")
    return [h.strip() for h in header], rows


def infer_schema(path: str | Path, label_column: str | None = None) -> Schema:
    """Guess column kinds: continuous iff every non-empty cell is a number."""
    header, rows = _read_rows(Path(path))
    if label_column is not None and label_column not in header:
        raise TableError(f"label column {label_column!r} not in header {header}")
    pairs = []
    for j, name in enumerate(header):
        if name == label_column:
            kind = ColumnKind.LABEL
        else:
            cells = [row[j].strip() for row in rows if row[j].strip()]
            kind = ColumnKind.CONTINUOUS if all(_is_float(c) for c in cells) else ColumnKind.CATEGORICAL
        pairs.append((name, kind))
    return Schema(tuple(pairs))


def load_csv(path: str | Path, schema: Schema) -> MixedTable:
    """Read a CSV into a :class:`MixedTable` according to ``schema``.

    Missing (empty) cells are rejected, ``ignore`` columns dropped, and
    categorical levels numbered in order of first appearance.
    """
    path = Path(path)
    header, rows = _read_rows(path)
    if header != schema.names:
        missing = [n for n in schema.names if n not in header]
        extra = [n for n in header if n not in schema.names]
        raise TableError(
            f"{path}: header does not match schema (missing={missing}, unexpected={extra}, "
            f"or column order differs)"
        )
    if not rows:
        raise TableError(f"{path}: table has no data rows")

    continuous, categorical, labels = [], [], None
    for j, (name, kind) in enumerate(schema.columns):
        if kind is ColumnKind.IGNORE:
            continue
        cells = [row[j].strip() for row in rows]
        for i, cell in enumerate(cells, 1):
            if cell == "":
                raise TableError(f"{path}: missing value at row {i}, column {name!r}")
        if kind is ColumnKind.CONTINUOUS:
            values = np.empty(len(cells))
            for i, cell in enumerate(cells):
                try:
                    values[i] = float(cell)
                except ValueError:
                    raise TableError(
                        f"{path}: cannot parse {cell!r} as a number at row {i + 1}, column {name!r}"
                    ) from None
            if not np.all(np.isfinite(values)):
                bad = int(np.flatnonzero(~np.isfinite(values))[0]) + 1
                raise TableError(f"{path}: non-finite value at row {bad}, column {name!r}")
            continuous.append(ContinuousColumn(name, values))
        elif kind is ColumnKind.CATEGORICAL:
            categorical.append(CategoricalColumn.from_values(name, cells))
        else:
            parsed = np.empty(len(cells), dtype=bool)
            for i, cell in enumerate(cells):
                try:
                    parsed[i] = _LABEL_VALUES[cell.lower()]
                except KeyError:
                    raise TableError(
                        f"{path}: label value {cell!r} at row {i + 1} not in {{0,1,true,false}}"
                    ) from None
            labels = parsed
    return MixedTable(tuple(continuous), tuple(categorical), labels)


def table_schema(table: MixedTable, label_name: str = "label") -> Schema:
    """Schema matching the column layout produced by :func:`write_csv`."""
    pairs = [(c.name, ColumnKind.CATEGORICAL) for c in table.categorical]
    pairs += [(c.name, ColumnKind.CONTINUOUS) for c in table.continuous]
    if table.labels is not None:
        pairs.append((label_name, ColumnKind.LABEL))
    return Schema.from_pairs(pairs)


def write_csv(table: MixedTable, path: str | Path, label_name: str = "label") -> Schema:
    """Write categorical, then continuous, then label columns; return the schema."""
    schema = table_schema(table, label_name)
    cols: list[list[str]] = []
    for c in table.categorical:
        cols.append([c.levels[k] for k in c.codes])
    for c in table.continuous:
        cols.append([repr(float(v)) for v in c.values])
    if table.labels is not None:
        cols.append(["1" if v else "0" for v in table.labels])
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(schema.names)
        writer.writerows(zip(*cols))
    return schema

"""CSV ingestion: numeric-column detection, corpus and ground-truth loading."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class ColumnId:
    table: str
    column: str
    index: int

    def key(self) -> tuple[str, str]:
        return (self.table, self.column)


@dataclass
class NumericColumn:
    id: ColumnId
    header: str
    values: np.ndarray  # 1-D float64, finite, length >= 1
    row_count: int


@dataclass
class Corpus:
    columns: list[NumericColumn]
    source: str

    def __post_init__(self):
        if not self.columns:
            raise DataError(f"no numeric columns in corpus from {self.source!r}")
        seen = set()
        for col in self.columns:
            k = (col.id.table, col.id.index)
            if k in seen:
                raise DataError(f"duplicate column id {k} in corpus")
            seen.add(k)

    def __len__(self) -> int:
        return len(self.columns)

    def ids(self) -> list[ColumnId]:
        return [c.id for c in self.columns]


@dataclass
class GroundTruth:
    # keyed by (table, column); the GT file carries no positional index
    labels: dict[tuple[str, str], str] = field(default_factory=dict)

    def label_for(self, cid: ColumnId) -> str | None:
        return self.labels.get(cid.key())

    def __len__(self) -> int:
        return len(self.labels)


def _parse_number(cell: str) -> float | None:
    """Parse a cell as a finite float, or None. Whitespace is stripped;
    thousands separators are not supported."""
    s = cell.strip()
    if not s:
        return None
    try:
        v = float(s)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def load_corpus(directory: str | Path, numeric_threshold: float = 0.95) -> Corpus:
    """Load every CSV in `directory` and keep columns whose non-empty cells
    are at least `numeric_threshold` parseable as finite numbers.

    Included columns carry only the successfully parsed values, in file order.
    """
    if not 0 < numeric_threshold <= 1:
        raise ValueError("numeric_threshold must be in (0, 1]")
    root = Path(directory)
    if not root.is_dir():
        raise DataError(f"not a readable directory: {root}")
    files = sorted(root.glob("*.csv"))
    columns: list[NumericColumn] = []
    for path in files:
        if path.name == "ground_truth.csv":
            continue
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                headers = next(reader)
            except StopIteration:
                raise DataError(f"{path}: empty file, expected a header row")
            cells: list[list[str]] = [[] for _ in headers]
            for rownum, row in enumerate(reader, start=2):
                if len(row) != len(headers):
                    raise DataError(
                        f"{path}: row {rownum} has {len(row)} fields, "
                        f"expected {len(headers)}"
                    )
                for j, cell in enumerate(row):
                    cells[j].append(cell)
        table = path.stem
        for j, header in enumerate(headers):
            nonempty = [c for c in cells[j] if c.strip()]
            if not nonempty:
                continue
            parsed = [v for c in nonempty if (v := _parse_number(c)) is not None]
            if len(parsed) / len(nonempty) < numeric_threshold or not parsed:
                continue
            cid = ColumnId(table=table, column=header, index=j)
            columns.append(
                NumericColumn(
                    id=cid,
                    header=header,
                    values=np.asarray(parsed, dtype=np.float64),
                    row_count=len(cells[j]),
                )
            )
    if not columns:
        raise DataError(f"no numeric columns found under {root}")
    return Corpus(columns=columns, source=str(root))


def load_ground_truth(path: str | Path) -> GroundTruth:
    """Read a `table,column,label` CSV into a GroundTruth map."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"ground-truth file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: missing header row")
        if [h.strip().lower() for h in header] != ["table", "column", "label"]:
            raise DataError(f"{path}: expected header 'table,column,label', got {header}")
        labels: dict[tuple[str, str], str] = {}
        for rownum, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise DataError(f"{path}: row {rownum} has {len(row)} fields, expected 3")
            key = (row[0], row[1])
            if key in labels:
                raise DataError(f"{path}: duplicate ground-truth key {key}")
            labels[key] = row[2]
    return GroundTruth(labels=labels)


def pooled_stack(corpus: Corpus) -> np.ndarray:
    """Concatenate all column values, in corpus order, into one 1-D array."""
    return np.concatenate([c.values for c in corpus.columns])

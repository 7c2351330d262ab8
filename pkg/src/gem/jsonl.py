"""Embedding JSONL I/O.

File layout: an optional first record {"meta": {...}} carrying the mode and
the run configuration, then one record per column:
{"table": str, "column": str, "header": str, "vector": [float, ...]}.
Floats serialize via repr, which round-trips exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .columns import ColumnId
from .errors import DataError


@dataclass
class EmbeddingFile:
    ids: list[ColumnId]
    headers: list[str]
    vectors: np.ndarray  # n x d
    meta: dict = field(default_factory=dict)

    @property
    def mode(self) -> str:
        return self.meta.get("mode", "")


def write_embeddings(path: str | Path, ids: list[ColumnId], headers: list[str],
                     vectors: np.ndarray, mode: str, config: dict | None = None) -> None:
    vectors = np.asarray(vectors, dtype=np.float64)
    if len(ids) != vectors.shape[0]:
        raise DataError("ids and vectors must align")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"meta": {"mode": mode, "config": config or {}}}) + "\n")
        for cid, header, vec in zip(ids, headers, vectors):
            rec = {
                "table": cid.table,
                "column": cid.column,
                "header": header,
                "vector": vec.tolist(),
            }
            fh.write(json.dumps(rec) + "\n")


def read_embeddings(path: str | Path) -> EmbeddingFile:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"embedding file not found: {path}")
    ids: list[ColumnId] = []
    headers: list[str] = []
    rows: list[np.ndarray] = []
    meta: dict = {}
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if "meta" in rec:
                meta = rec["meta"]
                continue
            vec = np.asarray(rec["vector"], dtype=np.float64)
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise DataError(f"{path}:{lineno}: inconsistent vector dimension")
            ids.append(ColumnId(table=rec["table"], column=rec["column"], index=len(ids)))
            headers.append(rec.get("header", rec["column"]))
            rows.append(vec)
    if not rows:
        raise DataError(f"{path}: no embedding records")
    return EmbeddingFile(ids=ids, headers=headers, vectors=np.stack(rows), meta=meta)

"""Header-context handling: loading external header embeddings, a deterministic
offline fallback encoder, and composition of the final column embeddings."""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .columns import ColumnId, Corpus
from .errors import DataError, NumericalError

MODE_D = "D"
MODE_D_S = "D+S"
MODE_D_S_C_CONCAT = "D+S+C-concat"
MODE_D_S_C_AGG = "D+S+C-agg"

_TOKEN_RE = re.compile(r"[^0-9a-z]+")


@dataclass
class HeaderEmbedding:
    id: ColumnId
    header: str
    vector: np.ndarray


@dataclass
class ComposedEmbedding:
    id: ColumnId
    mode: str
    vector: np.ndarray


def load_header_embeddings(path: str | Path, corpus: Corpus) -> list[HeaderEmbedding]:
    """Read the shared header-embedding JSONL and align it with the corpus.

    Every corpus column must be covered exactly once and all vectors must
    share one dimension.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"header-embedding file not found: {path}")
    records: dict[tuple[str, str], tuple[str, np.ndarray]] = {}
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
                continue
            key = (rec["table"], rec["column"])
            vec = np.asarray(rec["vector"], dtype=np.float64)
            if not np.isfinite(vec).all():
                raise DataError(f"{path}:{lineno}: non-finite entry for column {key}")
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise DataError(
                    f"{path}:{lineno}: dimension {len(vec)} != {dim} for column {key}"
                )
            records[key] = (rec.get("header", rec["column"]), vec)
    out = []
    for col in corpus.columns:
        key = col.id.key()
        if key not in records:
            raise DataError(f"{path}: no header embedding for column {key}")
        header, vec = records[key]
        out.append(HeaderEmbedding(id=col.id, header=header, vector=vec))
    return out


def fallback_header_embed(header: str, dim: int = 384, seed: int = 0) -> np.ndarray:
    """Deterministic stand-in for a sentence encoder.

    Tokenizes on non-alphanumerics after lowercasing; each token seeds an RNG
    drawing a unit vector, and the L2-normalized sum is returned. Disjoint
    token sets give near-orthogonal vectors at typical dims.
    """
    if dim < 8:
        raise ValueError("dim must be >= 8")
    tokens = [t for t in _TOKEN_RE.split(header.lower()) if t] or [""]
    acc = np.zeros(dim)
    for tok in tokens:
        digest = hashlib.sha256(f"{seed}:{tok}".encode("utf-8")).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
        v = rng.standard_normal(dim)
        acc += v / np.linalg.norm(v)
    norm = np.linalg.norm(acc)
    if norm == 0:  # cancelling token vectors; practically unreachable
        raise NumericalError(f"degenerate fallback embedding for header {header!r}")
    return acc / norm


def normalize_header(vector: np.ndarray) -> np.ndarray:
    """L1-normalize a header vector; signs are kept."""
    v = np.asarray(vector, dtype=np.float64)
    norm = np.abs(v).sum()
    if norm == 0:
        raise NumericalError("cannot L1-normalize a zero header vector")
    return v / norm


def compose_concat(cid: ColumnId, sig: np.ndarray, header: np.ndarray,
                   std_feats: np.ndarray | None = None) -> ComposedEmbedding:
    """Concatenate signature and normalized header, optionally re-appending
    the standardized features; no re-normalization afterwards."""
    parts = [np.asarray(sig, float), np.asarray(header, float)]
    if std_feats is not None:
        parts.append(np.asarray(std_feats, float))
    vec = np.concatenate(parts)
    if not np.isfinite(vec).all():
        raise NumericalError("non-finite entries in composed embedding")
    return ComposedEmbedding(id=cid, mode=MODE_D_S_C_CONCAT, vector=vec)


def compose_aggregate(cid: ColumnId, sig: np.ndarray, header: np.ndarray,
                      std_feats: np.ndarray) -> ComposedEmbedding:
    """Zero-pad the three parts to a common length and average element-wise."""
    parts = [np.asarray(p, float) for p in (sig, header, std_feats)]
    width = max(len(p) for p in parts)
    padded = np.zeros((3, width))
    for i, p in enumerate(parts):
        padded[i, : len(p)] = p
    vec = padded.mean(axis=0)
    if not np.isfinite(vec).all():
        raise NumericalError("non-finite entries in composed embedding")
    return ComposedEmbedding(id=cid, mode=MODE_D_S_C_AGG, vector=vec)

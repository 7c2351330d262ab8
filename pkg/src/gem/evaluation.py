"""Evaluation protocol: cosine neighbors, precision/recall at type-support k,
clustering accuracy and adjusted Rand index."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.cluster import KMeans

from .columns import ColumnId, GroundTruth
from .errors import DataError


@dataclass
class SimilarityMatrix:
    ids: list[ColumnId]
    scores: np.ndarray  # n x n cosine similarities


@dataclass
class EvalReport:
    per_type: dict[str, dict[str, float]]
    macro_precision: float
    macro_recall: float
    skipped_labels: list[str]
    mode: str = ""
    acc: float | None = None
    ari: float | None = None
    timestamp: str | None = None
    notes: dict = field(default_factory=dict)


def cosine_matrix(ids: list[ColumnId], vectors: np.ndarray) -> SimilarityMatrix:
    """Pairwise cosine similarities. Zero vectors get similarity 0 with
    everything and 1 with themselves by convention."""
    v = np.asarray(vectors, dtype=np.float64)
    if v.ndim != 2 or len(ids) != v.shape[0]:
        raise DataError("vectors must be an n x d matrix aligned with ids")
    norms = np.linalg.norm(v, axis=1)
    if (norms == 0).all():
        raise DataError("all embedding vectors are zero")
    safe = np.where(norms > 0, norms, 1.0)
    unit = v / safe[:, None]
    scores = unit @ unit.T
    scores[norms == 0, :] = 0.0
    scores[:, norms == 0] = 0.0
    np.fill_diagonal(scores, 1.0)
    return SimilarityMatrix(ids=list(ids), scores=scores)


def topk_neighbors(sim: SimilarityMatrix, i: int, k: int) -> list[int]:
    """Indices of the k most similar columns to column i, self excluded;
    ties broken by ascending index."""
    n = sim.scores.shape[0]
    if not 1 <= k <= n - 1:
        raise DataError(f"k must be in [1, {n - 1}], got {k}")
    row = sim.scores[i]
    candidates = [j for j in range(n) if j != i]
    candidates.sort(key=lambda j: (-row[j], j))
    return candidates[:k]


def precision_recall_at_k(sim: SimilarityMatrix, gt: GroundTruth,
                          mode: str = "", k_offset: int = -1) -> EvalReport:
    """Per-type and macro precision/recall with k tied to type support.

    For a column of a type with s labeled columns, k = s + k_offset (the
    default -1 excludes the column itself, making precision equal recall).
    Labels with support 1 are skipped and reported.
    """
    if len(gt) == 0:
        raise DataError("empty ground truth")
    labels: list[str | None] = []
    for cid in sim.ids:
        labels.append(gt.label_for(cid))
    support: dict[str, int] = {}
    for lab in labels:
        if lab is not None:
            support[lab] = support.get(lab, 0) + 1

    per_type: dict[str, list[tuple[float, float]]] = {}
    skipped = sorted(lab for lab, s in support.items() if s + k_offset < 1)
    for i, lab in enumerate(labels):
        if lab is None or lab in skipped:
            continue
        k = support[lab] + k_offset
        neigh = topk_neighbors(sim, i, k)
        tp = sum(1 for j in neigh if labels[j] == lab)
        precision = tp / k
        recall = tp / (support[lab] - 1)
        per_type.setdefault(lab, []).append((precision, recall))

    summary = {
        lab: {
            "precision": float(np.mean([p for p, _ in vals])),
            "recall": float(np.mean([r for _, r in vals])),
            "support": support[lab],
        }
        for lab, vals in sorted(per_type.items())
    }
    macro_p = float(np.mean([v["precision"] for v in summary.values()])) if summary else 0.0
    macro_r = float(np.mean([v["recall"] for v in summary.values()])) if summary else 0.0
    return EvalReport(
        per_type=summary,
        macro_precision=macro_p,
        macro_recall=macro_r,
        skipped_labels=skipped,
        mode=mode,
        notes={"k_offset": k_offset},
    )


def assign_clusters_argmax(mean_probs: np.ndarray) -> np.ndarray:
    """Cluster label = index of the largest responsibility; ties -> lowest."""
    m = np.asarray(mean_probs, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] < 1:
        raise DataError("expected an n x K responsibilities block")
    return m.argmax(axis=1)


def kmeans_clusters(vectors: np.ndarray, k: int, seed: int = 0) -> np.ndarray:
    """Lloyd k-means with k-means++ seeding, deterministic given the seed."""
    v = np.asarray(vectors, dtype=np.float64)
    if k > v.shape[0]:
        raise DataError(f"k={k} exceeds number of points {v.shape[0]}")
    km = KMeans(n_clusters=k, n_init=10, max_iter=300, random_state=seed)
    return km.fit_predict(v)


def _contingency(pred: np.ndarray, truth: np.ndarray) -> np.ndarray:
    _, pi = np.unique(pred, return_inverse=True)
    _, ti = np.unique(truth, return_inverse=True)
    table = np.zeros((pi.max() + 1, ti.max() + 1), dtype=np.int64)
    np.add.at(table, (pi, ti), 1)
    return table


def clustering_acc(pred, truth) -> float:
    """Fraction of points matched under the optimal one-to-one cluster-label
    assignment (Hungarian algorithm on the contingency table)."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or pred.size == 0:
        raise DataError("pred and truth must be equal-length, non-empty")
    table = _contingency(pred, truth)
    rows, cols = linear_sum_assignment(-table)
    return float(table[rows, cols].sum() / pred.size)


def adjusted_rand_index(pred, truth) -> float:
    """Chance-corrected pair-counting agreement between two labelings.

    Degenerate cases with a zero denominator (both partitions trivial)
    return 1.0 by convention.
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise DataError("pred and truth must have equal length")
    n = pred.size
    if n < 2:
        raise DataError("need at least 2 points")
    table = _contingency(pred, truth)

    def comb2(a):
        return a * (a - 1) / 2.0

    sum_ij = comb2(table).sum()
    a = comb2(table.sum(axis=1)).sum()
    b = comb2(table.sum(axis=0)).sum()
    expected = a * b / comb2(n)
    max_index = 0.5 * (a + b)
    if max_index == expected:
        return 1.0
    return float((sum_ij - expected) / (max_index - expected))

"""Per-column signatures: mean component responsibilities plus standardized
statistical features, L1-normalized into the probability-matrix row."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .columns import ColumnId, Corpus, NumericColumn
from .errors import NumericalError
from .gmm import GmmModel, responsibility_matrix

FEATURE_NAMES = ("unique_count", "mean", "cv", "entropy", "range", "p10", "p90")
N_FEATURES = len(FEATURE_NAMES)


@dataclass
class StatFeatures:
    unique_count: float
    mean: float
    cv: float
    entropy: float
    range: float
    p10: float
    p90: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.unique_count, self.mean, self.cv, self.entropy,
             self.range, self.p10, self.p90],
            dtype=np.float64,
        )


@dataclass
class SignatureVector:
    id: ColumnId
    mean_probs: np.ndarray   # length K, non-negative, sums to 1
    std_features: np.ndarray  # length 7, corpus-standardized
    normalized: np.ndarray   # length K + 7, L1 norm 1


def stat_features(col: NumericColumn) -> StatFeatures:
    """Summary statistics of one column.

    Entropy is Shannon entropy in nats over the relative frequencies of the
    distinct values; CV uses the population std and is 0 when the mean is 0.
    """
    v = col.values
    uniques, counts = np.unique(v, return_counts=True)
    mean = float(v.mean())
    std = float(v.std())  # population std
    cv = std / mean if mean != 0.0 else 0.0
    freqs = counts / counts.sum()
    entropy = float(-(freqs * np.log(freqs)).sum())
    p10, p90 = np.percentile(v, [10, 90])  # linear interpolation at (n-1)p
    return StatFeatures(
        unique_count=float(len(uniques)),
        mean=mean,
        cv=cv,
        entropy=max(entropy, 0.0),
        range=float(v.max() - v.min()),
        p10=float(p10),
        p90=float(p90),
    )


def mean_component_probs(col: NumericColumn, model: GmmModel) -> np.ndarray:
    """Average responsibility vector over the column's values."""
    return responsibility_matrix(col.values, model).mean(axis=0)


def standardize_features(all_features: list[StatFeatures]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Corpus-level z-scoring of the feature matrix.

    Returns (standardized matrix, feature means, feature stds); features with
    zero population std map to 0 and report std 1 so held-out columns can
    reuse the transform.
    """
    raw = np.stack([f.as_array() for f in all_features])
    means = raw.mean(axis=0)
    stds = raw.std(axis=0)
    safe = np.where(stds > 0, stds, 1.0)
    standardized = (raw - means) / safe
    standardized[:, stds == 0] = 0.0
    return standardized, means, safe


def build_signature(mean_probs: np.ndarray, std_feats: np.ndarray) -> np.ndarray:
    """Concatenate responsibilities and standardized features, then divide by
    the L1 norm. Signs are kept; the absolute values sum to 1."""
    a = np.concatenate([np.asarray(mean_probs, dtype=np.float64),
                        np.asarray(std_feats, dtype=np.float64)])
    if not np.isfinite(a).all():
        raise NumericalError("augmented vector contains non-finite entries")
    norm = np.abs(a).sum()
    if norm == 0.0:
        raise NumericalError("cannot L1-normalize an all-zero augmented vector")
    return a / norm


def signature_matrix(corpus: Corpus, model: GmmModel) -> list[SignatureVector]:
    """One signature row per column, in corpus order."""
    feats = [stat_features(c) for c in corpus.columns]
    std_feats, _, _ = standardize_features(feats)
    out = []
    for col, f in zip(corpus.columns, std_feats):
        m = mean_component_probs(col, model)
        out.append(
            SignatureVector(
                id=col.id,
                mean_probs=m,
                std_features=f,
                normalized=build_signature(m, f),
            )
        )
    return out


def distribution_only_matrix(corpus: Corpus, model: GmmModel) -> list[SignatureVector]:
    """"D"-mode rows: L1-normalized mean responsibilities without features."""
    out = []
    for col in corpus.columns:
        m = mean_component_probs(col, model)
        out.append(
            SignatureVector(
                id=col.id,
                mean_probs=m,
                std_features=np.zeros(0),
                normalized=m / np.abs(m).sum(),
            )
        )
    return out

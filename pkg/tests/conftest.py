import numpy as np
import pytest

from gem.columns import ColumnId, Corpus, GroundTruth, NumericColumn


def make_column(values, table="t", column="c", index=0, header=None):
    values = np.asarray(values, dtype=np.float64)
    return NumericColumn(
        id=ColumnId(table=table, column=column, index=index),
        header=header if header is not None else column,
        values=values,
        row_count=len(values),
    )


def make_corpus(value_lists, labels=None, headers=None):
    """Corpus of single-table columns c0..cN, with optional ground truth."""
    cols = []
    for i, vals in enumerate(value_lists):
        header = headers[i] if headers else f"c{i}"
        cols.append(make_column(vals, column=f"c{i}", index=i, header=header))
    corpus = Corpus(columns=cols, source="<memory>")
    if labels is None:
        return corpus
    gt = GroundTruth(labels={c.id.key(): lab for c, lab in zip(cols, labels)})
    return corpus, gt


def brute_force_precision(vectors, labels, k_offset=-1):
    """O(n^2) reference for precision/recall at type-support k.

    Independent of the library: plain loops, explicit cosine, Python sort.
    """
    n = len(labels)
    vectors = [np.asarray(v, dtype=np.float64) for v in vectors]

    def cos(a, b):
        na, nb = np.sqrt((a * a).sum()), np.sqrt((b * b).sum())
        if na == 0 or nb == 0:
            return 0.0
        return float((a * b).sum() / (na * nb))

    support = {}
    for lab in labels:
        support[lab] = support.get(lab, 0) + 1

    per_type = {}
    skipped = sorted(lab for lab, s in support.items() if s + k_offset < 1)
    for i in range(n):
        lab = labels[i]
        if lab in skipped:
            continue
        k = support[lab] + k_offset
        others = sorted((j for j in range(n) if j != i),
                        key=lambda j: (-cos(vectors[i], vectors[j]), j))
        tp = sum(1 for j in others[:k] if labels[j] == lab)
        per_type.setdefault(lab, []).append((tp / k, tp / (support[lab] - 1)))

    # aggregation mirrors the library's np.mean so "exact match" is not
    # defeated by float summation order; ranking and cosine stay independent
    summary = {
        lab: (float(np.mean([p for p, _ in v])), float(np.mean([r for _, r in v])))
        for lab, v in sorted(per_type.items())
    }
    macro_p = float(np.mean([p for p, _ in summary.values()])) if summary else 0.0
    macro_r = float(np.mean([r for _, r in summary.values()])) if summary else 0.0
    return macro_p, macro_r, summary, skipped


@pytest.fixture
def symmetric_two_component_model():
    """Equal-weight components at +/-3 with unit variance."""
    from gem.gmm import GmmModel
    return GmmModel(
        weights=np.array([0.5, 0.5]),
        means=np.array([-3.0, 3.0]),
        variances=np.array([1.0, 1.0]),
        log_likelihood=0.0,
        n_iterations=0,
        seed=0,
    )

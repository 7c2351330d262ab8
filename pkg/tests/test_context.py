import json

import numpy as np
import pytest

from gem.columns import ColumnId
from gem.context import (
    compose_aggregate, compose_concat, fallback_header_embed,
    load_header_embeddings, normalize_header,
)
from gem.errors import DataError, NumericalError

from conftest import make_corpus

CID = ColumnId("t", "c", 0)


def write_jsonl(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")


class TestLoadHeaderEmbeddings:
    def test_covers_corpus(self, tmp_path):
        corpus = make_corpus([[1.0], [2.0]])
        write_jsonl(tmp_path / "h.jsonl", [
            {"table": "t", "column": "c0", "header": "c0", "vector": [1.0, 0.0]},
            {"table": "t", "column": "c1", "header": "c1", "vector": [0.0, 1.0]},
        ])
        embs = load_header_embeddings(tmp_path / "h.jsonl", corpus)
        assert len(embs) == 2
        assert embs[0].id == corpus.columns[0].id

    def test_missing_column_names_it(self, tmp_path):
        corpus = make_corpus([[1.0], [2.0]])
        write_jsonl(tmp_path / "h.jsonl", [
            {"table": "t", "column": "c0", "vector": [1.0]},
        ])
        with pytest.raises(DataError, match="c1"):
            load_header_embeddings(tmp_path / "h.jsonl", corpus)

    def test_mixed_dimensions_error(self, tmp_path):
        corpus = make_corpus([[1.0], [2.0]])
        write_jsonl(tmp_path / "h.jsonl", [
            {"table": "t", "column": "c0", "vector": [1.0] * 384},
            {"table": "t", "column": "c1", "vector": [1.0] * 768},
        ])
        with pytest.raises(DataError, match="dimension"):
            load_header_embeddings(tmp_path / "h.jsonl", corpus)

    def test_non_finite_entry_error(self, tmp_path):
        corpus = make_corpus([[1.0]])
        write_jsonl(tmp_path / "h.jsonl", [
            {"table": "t", "column": "c0", "vector": [float("nan")]},
        ])
        with pytest.raises(DataError, match="non-finite"):
            load_header_embeddings(tmp_path / "h.jsonl", corpus)


class TestFallbackEmbed:
    def test_deterministic(self):
        a = fallback_header_embed("age")
        b = fallback_header_embed("age")
        np.testing.assert_array_equal(a, b)
        assert a @ b == pytest.approx(1.0)

    def test_case_folded(self):
        np.testing.assert_array_equal(
            fallback_header_embed("age"), fallback_header_embed("Age"))

    def test_tokenization_on_non_alphanumerics(self):
        np.testing.assert_array_equal(
            fallback_header_embed("unit price"), fallback_header_embed("unit_price"))

    def test_disjoint_tokens_near_orthogonal(self):
        rng = np.random.default_rng(0)
        words = [f"w{i}" for i in range(2000)]
        cosines = []
        for i in range(1000):
            a = fallback_header_embed(words[2 * i], dim=384)
            b = fallback_header_embed(words[2 * i + 1], dim=384)
            cosines.append(abs(float(a @ b)))
        assert max(cosines) < 0.2

    def test_empty_header_is_defined(self):
        v = fallback_header_embed("")
        assert np.linalg.norm(v) == pytest.approx(1.0)
        np.testing.assert_array_equal(v, fallback_header_embed("  "))

    def test_seed_changes_vectors(self):
        a = fallback_header_embed("age", seed=0)
        b = fallback_header_embed("age", seed=1)
        assert not np.array_equal(a, b)

    def test_dim_too_small(self):
        with pytest.raises(ValueError):
            fallback_header_embed("age", dim=4)


class TestNormalizeHeader:
    def test_positive(self):
        np.testing.assert_allclose(normalize_header(np.array([2.0, 2.0])), [0.5, 0.5])

    def test_signed(self):
        np.testing.assert_allclose(normalize_header(np.array([1.0, -1.0])), [0.5, -0.5])

    def test_zero_vector_errors(self):
        with pytest.raises(NumericalError):
            normalize_header(np.zeros(4))

    def test_l1_property(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            v = rng.normal(size=rng.integers(1, 50))
            assert np.abs(normalize_header(v)).sum() == pytest.approx(1.0, abs=1e-12)


class TestCompose:
    def test_concat_two_blocks(self):
        e = compose_concat(CID, np.array([0.5, 0.5]), np.array([1.0, 0.0]))
        np.testing.assert_array_equal(e.vector, [0.5, 0.5, 1.0, 0.0])

    def test_concat_with_features(self):
        e = compose_concat(CID, np.array([0.5, 0.5]), np.array([1.0, 0.0]),
                           np.array([0.0]))
        np.testing.assert_array_equal(e.vector, [0.5, 0.5, 1.0, 0.0, 0.0])

    def test_concat_preserves_blocks_bit_exactly(self):
        rng = np.random.default_rng(1)
        p, s, f = rng.normal(size=9), rng.normal(size=384), rng.normal(size=7)
        e = compose_concat(CID, p, s, f)
        assert len(e.vector) == 9 + 384 + 7
        np.testing.assert_array_equal(e.vector[:9], p)
        np.testing.assert_array_equal(e.vector[9:393], s)
        np.testing.assert_array_equal(e.vector[393:], f)

    def test_aggregate_equal_parts(self):
        e = compose_aggregate(CID, np.array([1.0]), np.array([1.0]), np.array([1.0]))
        np.testing.assert_array_equal(e.vector, [1.0])

    def test_aggregate_padding_mean(self):
        e = compose_aggregate(CID, np.array([2.0, 0.0]), np.array([0.0, 2.0]),
                              np.array([0.0, 0.0]))
        np.testing.assert_allclose(e.vector, [2 / 3, 2 / 3])

    def test_aggregate_length_is_max(self):
        e = compose_aggregate(CID, np.ones(5), np.ones(12), np.ones(7))
        assert len(e.vector) == 12

    def test_identical_headers_differ_only_in_value_blocks(self):
        s = normalize_header(fallback_header_embed("score", dim=32))
        p1, p2 = np.array([0.9, 0.1]), np.array([0.1, 0.9])
        f1, f2 = np.array([1.0]), np.array([-1.0])
        e1 = compose_concat(CID, p1, s, f1).vector
        e2 = compose_concat(CID, p2, s, f2).vector
        np.testing.assert_array_equal(e1[2:34], e2[2:34])
        assert not np.array_equal(e1[:2], e2[:2])

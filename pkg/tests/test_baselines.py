import numpy as np
import pytest

from gem.baselines import (
    BaselineConfig, ks_fingerprint, ks_statistic, paf_encode, paf_frequencies,
    ple_bins, ple_encode, squash, squashing_gmm_encode, KS_FAMILIES,
)
from gem.errors import DataError
from gem.gmm import FitConfig

from conftest import make_column, make_corpus


class TestPle:
    def test_piecewise_formula(self):
        enc = ple_encode(make_column([1.5]), np.array([0.0, 1.0, 2.0]))
        np.testing.assert_allclose(enc, [1.0, 0.5])

    def test_boundary_values(self):
        bins = np.array([0.0, 1.0, 2.0])
        np.testing.assert_allclose(ple_encode(make_column([0.0]), bins), [0.0, 0.0])
        np.testing.assert_allclose(ple_encode(make_column([2.0]), bins), [1.0, 1.0])

    def test_clamp_outside_range(self):
        bins = np.array([0.0, 1.0])
        np.testing.assert_allclose(ple_encode(make_column([-5.0]), bins), [0.0])
        np.testing.assert_allclose(ple_encode(make_column([99.0]), bins), [1.0])

    def test_constant_column_at_top(self):
        bins = np.array([0.0, 1.0, 2.0, 3.0])
        np.testing.assert_allclose(ple_encode(make_column([3.0, 3.0]), bins), np.ones(3))

    def test_outputs_in_unit_interval_and_monotone(self):
        rng = np.random.default_rng(0)
        stack = rng.normal(0, 5, 1000)
        bins = ple_bins(stack, 10)
        xs = np.sort(rng.normal(0, 5, 50))
        encs = [ple_encode(make_column([x]), bins) for x in xs]
        for e in encs:
            assert ((0 <= e) & (e <= 1)).all()
        for a, b in zip(encs, encs[1:]):
            assert (a <= b + 1e-12).all()

    def test_non_increasing_boundaries_error(self):
        with pytest.raises(DataError):
            ple_encode(make_column([1.0]), np.array([0.0, 0.0, 1.0]))

    def test_quantile_bins_constant_stack_error(self):
        with pytest.raises(DataError):
            ple_bins(np.ones(100), 5)


class TestPaf:
    def test_x_zero(self):
        freqs = paf_frequencies(4)
        enc = paf_encode(make_column([0.0]), freqs, 0.0, 1.0)
        np.testing.assert_allclose(enc[:4], 0.0, atol=1e-12)
        np.testing.assert_allclose(enc[4:], 1.0)

    def test_half_period(self):
        # one frequency c = 2^{1 - 1/2} = sqrt(2); x with c*x = 0.5
        freqs = paf_frequencies(1)
        x = 0.5 / freqs[0]
        enc = paf_encode(make_column([x]), freqs, 0.0, 1.0)
        assert enc[0] == pytest.approx(0.0, abs=1e-12)
        assert enc[1] == pytest.approx(-1.0)

    def test_constant_column_equals_single_value_encoding(self):
        freqs = paf_frequencies(8)
        a = paf_encode(make_column([0.3] * 10), freqs, 0.0, 1.0)
        b = paf_encode(make_column([0.3]), freqs, 0.0, 1.0)
        np.testing.assert_allclose(a, b)

    def test_degenerate_pooled_range_maps_to_zero(self):
        freqs = paf_frequencies(3)
        enc = paf_encode(make_column([7.0, 7.0]), freqs, 7.0, 7.0)
        np.testing.assert_allclose(enc, paf_encode(make_column([0.0]), freqs, 0.0, 1.0))

    def test_bounds_and_pythagorean_identity(self):
        rng = np.random.default_rng(1)
        freqs = paf_frequencies(6)
        col = make_column(rng.uniform(-3, 3, 1))
        enc = paf_encode(col, freqs, -3.0, 3.0)
        assert ((-1 <= enc) & (enc <= 1)).all()
        np.testing.assert_allclose(enc[:6] ** 2 + enc[6:] ** 2, 1.0)

    def test_frequencies_log_spaced(self):
        f = paf_frequencies(4)
        np.testing.assert_allclose(f, [0.5, 1.0, 2.0, 4.0])


class TestKs:
    def test_hand_case_uniform(self):
        d = ks_statistic(np.array([0.25, 0.5, 0.75]), lambda x: np.clip(x, 0, 1))
        assert d == pytest.approx(0.25)

    def test_own_ecdf_bound(self):
        rng = np.random.default_rng(2)
        sample = rng.normal(size=40)
        xs = np.sort(sample)

        def ecdf(q):
            return np.searchsorted(xs, q, side="right") / len(xs)

        assert ks_statistic(sample, ecdf) <= 1 / len(sample) + 1e-12

    def test_negative_column_lognormal_slot_is_one(self):
        col = make_column([-3.0, -1.0, -2.0, -0.5])
        fp = ks_fingerprint(col)
        idx = KS_FAMILIES.index("lognormal")
        assert fp[idx] == 1.0
        assert fp[KS_FAMILIES.index("exponential")] == 1.0
        assert fp[KS_FAMILIES.index("gamma")] == 1.0

    def test_entries_in_unit_interval(self):
        rng = np.random.default_rng(3)
        for vals in (rng.normal(size=50), rng.exponential(size=50),
                     rng.uniform(size=50), np.array([1.0, 1.0, 2.0])):
            fp = ks_fingerprint(make_column(vals))
            assert fp.shape == (7,)
            assert ((0 <= fp) & (fp <= 1)).all()

    def test_good_fit_scores_low(self):
        rng = np.random.default_rng(4)
        fp = ks_fingerprint(make_column(rng.normal(10, 2, 2000)))
        assert fp[KS_FAMILIES.index("normal")] < 0.05

    def test_too_short_column(self):
        with pytest.raises(DataError):
            ks_fingerprint(make_column([1.0]))


class TestSquashingGmm:
    def test_squash_properties(self):
        assert squash(np.array([0.0]))[0] == 0.0
        v = np.array([0.5, 3.0, 100.0])
        np.testing.assert_allclose(squash(-v), -squash(v))
        xs = np.linspace(-50, 50, 101)
        assert (np.diff(squash(xs)) > 0).all()

    def test_single_prototype(self):
        corpus = make_corpus([[1.0, 2.0], [3.0, 4.0]])
        enc = squashing_gmm_encode(
            corpus, BaselineConfig(n_prototypes=1),
            FitConfig(n_components=1, n_restarts=1, seed=0))
        np.testing.assert_allclose(enc, np.ones((2, 1)))

    def test_separation(self):
        rng = np.random.default_rng(5)
        corpus = make_corpus([
            rng.normal(0, 1, 300), rng.normal(1000, 1, 300), rng.normal(0, 1, 300),
        ])
        enc = squashing_gmm_encode(
            corpus, BaselineConfig(n_prototypes=4),
            FitConfig(n_components=4, n_restarts=3, seed=1))

        def cosine(a, b):
            return a @ b / (np.linalg.norm(a) * np.linalg.norm(b))

        assert cosine(enc[0], enc[1]) < cosine(enc[0], enc[2])

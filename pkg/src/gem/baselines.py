"""Numeric-only baseline encoders: piecewise-linear encoding, periodic
activation features, Kolmogorov-Smirnov distribution fingerprints, and the
squashed-GMM prototype encoder."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .columns import Corpus, NumericColumn, pooled_stack
from .errors import DataError
from .gmm import FitConfig, fit, responsibility_matrix

KS_FAMILIES = ("normal", "uniform", "exponential", "beta", "gamma", "lognormal", "logistic")


@dataclass
class BaselineConfig:
    n_bins: int = 50          # PLE
    n_frequencies: int = 50   # PAF
    n_prototypes: int = 50    # squashing-GMM
    ks_distributions: tuple[str, ...] = KS_FAMILIES

    def __post_init__(self):
        if min(self.n_bins, self.n_frequencies, self.n_prototypes) < 1:
            raise ValueError("all baseline counts must be >= 1")


# ---------------------------------------------------------------- PLE

def ple_bins(stack: np.ndarray, n_bins: int) -> np.ndarray:
    """Empirical-quantile bin boundaries; duplicates collapse the bin count."""
    qs = np.quantile(np.asarray(stack, float), np.linspace(0, 1, n_bins + 1))
    bins = np.unique(qs)
    if len(bins) < 2:
        raise DataError("pooled stack is constant; cannot build PLE bins")
    return bins


def ple_encode(col: NumericColumn, bins: np.ndarray) -> np.ndarray:
    """Mean over the column of per-value piecewise-linear encodings.

    For value x, component t is 0 below the segment, 1 above it, and the
    linear fraction inside; values outside [b_0, b_T] are clamped.
    """
    b = np.asarray(bins, float)
    if (np.diff(b) <= 0).any():
        raise DataError("PLE boundaries must be strictly increasing")
    x = col.values[:, None]
    lo, hi = b[None, :-1], b[None, 1:]
    enc = np.clip((x - lo) / (hi - lo), 0.0, 1.0)
    return enc.mean(axis=0)


# ---------------------------------------------------------------- PAF

def paf_frequencies(n_frequencies: int) -> np.ndarray:
    """Deterministic log-spaced frequencies c_k = 2^(k - F/2), k = 1..F."""
    k = np.arange(1, n_frequencies + 1, dtype=np.float64)
    return 2.0 ** (k - n_frequencies / 2.0)


def paf_encode(col: NumericColumn, frequencies: np.ndarray,
               pooled_min: float, pooled_max: float) -> np.ndarray:
    """Mean over the column of [sin(2 pi c_k x), cos(2 pi c_k x)] features,
    with x min-max scaled by the pooled range."""
    c = np.asarray(frequencies, float)
    if pooled_max > pooled_min:
        x = (col.values - pooled_min) / (pooled_max - pooled_min)
    else:
        x = np.zeros_like(col.values)
    phase = 2.0 * np.pi * x[:, None] * c[None, :]
    enc = np.concatenate([np.sin(phase), np.cos(phase)], axis=1)
    return enc.mean(axis=0)


# ---------------------------------------------------------------- KS

def ks_statistic(sample: np.ndarray, cdf) -> float:
    """Two-sided one-sample KS statistic against a reference CDF."""
    xs = np.sort(np.asarray(sample, float))
    n = len(xs)
    f = np.asarray(cdf(xs), float)
    i = np.arange(1, n + 1)
    d_plus = (i / n - f).max()
    d_minus = (f - (i - 1) / n).max()
    return float(max(d_plus, d_minus, 0.0))


def _moment_fit_cdf(family: str, v: np.ndarray):
    """Method-of-moments CDF for one reference family, or None when the
    family cannot represent the data (degenerate moments)."""
    m = float(v.mean())
    s = float(v.std())
    if family == "normal":
        if s == 0:
            return None
        return stats.norm(loc=m, scale=s).cdf
    if family == "uniform":
        if s == 0:
            return None
        half = np.sqrt(3.0) * s
        return stats.uniform(loc=m - half, scale=2 * half).cdf
    if family == "logistic":
        if s == 0:
            return None
        return stats.logistic(loc=m, scale=s * np.sqrt(3.0) / np.pi).cdf
    if family == "beta":
        lo, hi = float(v.min()), float(v.max())
        if hi <= lo:
            return None
        u = (v - lo) / (hi - lo)
        mu, var = float(u.mean()), float(u.var())
        if var == 0 or var >= mu * (1 - mu):
            return None
        common = mu * (1 - mu) / var - 1.0
        a, b = mu * common, (1 - mu) * common
        if a <= 0 or b <= 0:
            return None
        return stats.beta(a, b, loc=lo, scale=hi - lo).cdf
    # positive-support families: negative data is out of support and scores
    # the worst value; a zero minimum gets an epsilon shift (lognormal only,
    # exponential and gamma admit 0)
    if family in ("exponential", "gamma", "lognormal"):
        if v.min() < 0:
            return None
        shift = 0.0
        if family == "lognormal" and v.min() == 0:
            shift = max(1e-9, 1e-9 * float(np.ptp(v)))
        w = v + shift
        mw, sw = float(w.mean()), float(w.std())
        if family == "exponential":
            if mw <= 0:
                return None
            return stats.expon(loc=-shift, scale=mw).cdf
        if sw == 0 or mw <= 0:
            return None
        if family == "gamma":
            shape = mw * mw / (sw * sw)
            scale = sw * sw / mw
            return stats.gamma(shape, loc=-shift, scale=scale).cdf
        # lognormal
        sigma2 = np.log(1.0 + (sw * sw) / (mw * mw))
        mu = np.log(mw) - sigma2 / 2.0
        return stats.lognorm(np.sqrt(sigma2), loc=-shift, scale=np.exp(mu)).cdf
    raise ValueError(f"unknown KS family {family!r}")


def ks_fingerprint(col: NumericColumn,
                   families: tuple[str, ...] = KS_FAMILIES) -> np.ndarray:
    """KS statistic of the column against each moment-fitted reference family.

    Families the data cannot be fitted to contribute the worst value 1.0.
    """
    if len(col.values) < 2:
        raise DataError("KS fingerprint needs at least 2 values")
    out = np.ones(len(families))
    for i, fam in enumerate(families):
        cdf = _moment_fit_cdf(fam, col.values)
        if cdf is not None:
            out[i] = ks_statistic(col.values, cdf)
    return out


# ---------------------------------------------------------------- squashing-GMM

def squash(v: np.ndarray) -> np.ndarray:
    """Sign-preserving log compression: sign(v) * ln(1 + |v|)."""
    v = np.asarray(v, float)
    return np.sign(v) * np.log1p(np.abs(v))


def squashing_gmm_encode(corpus: Corpus, cfg: BaselineConfig,
                         fit_cfg: FitConfig | None = None) -> np.ndarray:
    """Per-column mean responsibilities under a GMM fitted to the squashed
    pooled stack; rows align with corpus order."""
    if fit_cfg is None:
        fit_cfg = FitConfig(n_components=cfg.n_prototypes)
    elif fit_cfg.n_components != cfg.n_prototypes:
        fit_cfg = FitConfig(
            n_components=cfg.n_prototypes, tol=fit_cfg.tol, max_iter=fit_cfg.max_iter,
            n_restarts=fit_cfg.n_restarts, seed=fit_cfg.seed,
            variance_floor=fit_cfg.variance_floor,
        )
    model = fit(squash(pooled_stack(corpus)), fit_cfg)
    rows = [responsibility_matrix(squash(c.values), model).mean(axis=0)
            for c in corpus.columns]
    return np.stack(rows)

"""1-D Gaussian mixture fitting by EM with restarts, plus BIC model selection.

All density work happens in log space so that stacks mixing very different
magnitudes (years next to ratios) do not underflow. Components are kept in
canonical order (ascending mean, ties broken by weight) after every fit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
from scipy.special import logsumexp

from .errors import DataError, NumericalError

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass
class FitConfig:
    n_components: int = 50
    tol: float = 1e-3
    max_iter: int = 200
    n_restarts: int = 10
    seed: int = 0
    # None -> 1e-6 x pooled variance, resolved at fit time
    variance_floor: float | None = None

    def __post_init__(self):
        if self.n_components < 1:
            raise ValueError("n_components must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 1 or self.n_restarts < 1:
            raise ValueError("max_iter and n_restarts must be >= 1")


@dataclass
class GmmModel:
    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    log_likelihood: float  # total log-likelihood of the winning run
    n_iterations: int
    seed: int
    config: FitConfig | None = None
    # per-restart total log-likelihood traces; not serialized
    traces: list[list[float]] = field(default_factory=list, repr=False)

    @property
    def k(self) -> int:
        return len(self.weights)

    def validate(self) -> None:
        if abs(self.weights.sum() - 1.0) > 1e-9 or (self.weights < 0).any():
            raise NumericalError("mixture weights must be non-negative and sum to 1")
        if (self.variances <= 0).any():
            raise NumericalError("all variances must be positive")


def component_pdf(x: float, mean: float, variance: float) -> float:
    """Univariate normal density N(x | mean, variance)."""
    if variance <= 0:
        raise ValueError(f"variance must be positive, got {variance}")
    return math.exp(-0.5 * (x - mean) ** 2 / variance) / math.sqrt(2.0 * math.pi * variance)


def _log_weighted_densities(xs: np.ndarray, means: np.ndarray, weights: np.ndarray,
                            variances: np.ndarray) -> np.ndarray:
    """N x K matrix of log(pi_j) + log N(x_n | mu_j, sigma_j^2)."""
    with np.errstate(divide="ignore", over="ignore"):
        log_w = np.log(weights)
        d = xs[:, None] - means[None, :]
        return log_w[None, :] - 0.5 * (_LOG_2PI + np.log(variances))[None, :] - 0.5 * d * d / variances[None, :]


def mixture_pdf(x: float, model: GmmModel) -> float:
    """Weighted-sum mixture density at x."""
    lwd = _log_weighted_densities(np.asarray([x], dtype=np.float64),
                                  model.means, model.weights, model.variances)
    return float(np.exp(logsumexp(lwd[0])))


def log_responsibility_matrix(xs: np.ndarray, model: GmmModel) -> np.ndarray:
    """N x K log responsibilities; each row log-normalizes to 0."""
    lwd = _log_weighted_densities(np.asarray(xs, dtype=np.float64),
                                  model.means, model.weights, model.variances)
    norm = logsumexp(lwd, axis=1)
    if not np.isfinite(norm).all():
        bad = np.asarray(xs)[~np.isfinite(norm)][0]
        raise NumericalError(
            f"all component densities underflow at x={bad!r}; value out of representable range"
        )
    return lwd - norm[:, None]


def responsibility_matrix(xs: np.ndarray, model: GmmModel) -> np.ndarray:
    """N x K posterior component probabilities; rows sum to 1."""
    return np.exp(log_responsibility_matrix(xs, model))


def responsibilities(x: float, model: GmmModel) -> np.ndarray:
    """Posterior probability of each component having generated x."""
    return responsibility_matrix(np.asarray([x]), model)[0]


def _canonicalize(weights, means, variances):
    order = np.lexsort((weights, means))
    return weights[order], means[order], variances[order]


def _em_run(x: np.ndarray, distinct: np.ndarray, cfg: FitConfig, floor: float,
            pooled_var: float, rng: np.random.Generator):
    """One EM run from a random initialization. Returns (params, trace, iters)."""
    k = cfg.n_components
    n = len(x)
    means = np.sort(rng.choice(distinct, size=k, replace=False))
    weights = np.full(k, 1.0 / k)
    variances = np.full(k, max(pooled_var, floor))

    trace: list[float] = []
    prev_mean_ll = -np.inf
    for it in range(1, cfg.max_iter + 1):
        lwd = _log_weighted_densities(x, means, weights, variances)
        log_norm = logsumexp(lwd, axis=1)
        total_ll = float(log_norm.sum())
        trace.append(total_ll)
        mean_ll = total_ll / n
        if abs(mean_ll - prev_mean_ll) < cfg.tol:
            break
        prev_mean_ll = mean_ll

        resp = np.exp(lwd - log_norm[:, None])
        nk = resp.sum(axis=0)
        nk = np.maximum(nk, 1e-300)
        weights = nk / n
        weights /= weights.sum()
        means = (resp * x[:, None]).sum(axis=0) / nk
        d = x[:, None] - means[None, :]
        variances = np.maximum((resp * d * d).sum(axis=0) / nk, floor)
    return (weights, means, variances), trace, len(trace)


def fit(stack, cfg: FitConfig) -> GmmModel:
    """Fit a K-component 1-D GMM to the pooled value stack.

    Runs cfg.n_restarts independent EM runs (restart r uses RNG seed
    cfg.seed + r) and keeps the one with the highest final log-likelihood,
    ties going to the lowest restart index.
    """
    x = np.asarray(stack, dtype=np.float64)
    if x.ndim != 1 or len(x) == 0:
        raise DataError("stack must be a non-empty 1-D array")
    distinct = np.unique(x)
    if len(distinct) < cfg.n_components:
        raise DataError(
            f"stack has only {len(distinct)} distinct values; "
            f"choose n_components <= {len(distinct)} (got {cfg.n_components})"
        )
    pooled_var = float(x.var())
    floor = cfg.variance_floor
    if floor is None:
        floor = 1e-6 * pooled_var if pooled_var > 0 else 1e-12
    if floor <= 0:
        raise ValueError("variance_floor must be positive")

    best = None
    traces: list[list[float]] = []
    for r in range(cfg.n_restarts):
        rng = np.random.default_rng(cfg.seed + r)
        params, trace, iters = _em_run(x, distinct, cfg, floor, pooled_var, rng)
        traces.append(trace)
        if best is None or trace[-1] > best[1]:
            best = (params, trace[-1], iters)

    (weights, means, variances), final_ll, iters = best
    weights, means, variances = _canonicalize(weights, means, variances)
    model = GmmModel(
        weights=weights,
        means=means,
        variances=variances,
        log_likelihood=final_ll,
        n_iterations=iters,
        seed=cfg.seed,
        config=cfg,
        traces=traces,
    )
    model.validate()
    return model


def select_components_bic(stack, candidates, cfg: FitConfig) -> tuple[int, dict[int, float]]:
    """Pick the candidate K minimizing BIC = -2 logL + (3K - 1) ln n."""
    x = np.asarray(stack, dtype=np.float64)
    n = len(x)
    scores: dict[int, float] = {}
    for k in sorted(set(int(c) for c in candidates)):
        cfg_k = FitConfig(
            n_components=k, tol=cfg.tol, max_iter=cfg.max_iter,
            n_restarts=cfg.n_restarts, seed=cfg.seed, variance_floor=cfg.variance_floor,
        )
        model = fit(x, cfg_k)
        scores[k] = -2.0 * model.log_likelihood + (3 * k - 1) * math.log(n)
    best_k = min(scores, key=lambda k: (scores[k], k))
    return best_k, scores


def save_model(model: GmmModel, path: str | Path) -> None:
    """Persist a model as JSON; floats round-trip exactly via repr."""
    payload = {
        "k": model.k,
        "weights": model.weights.tolist(),
        "means": model.means.tolist(),
        "variances": model.variances.tolist(),
        "log_likelihood": model.log_likelihood,
        "n_iterations": model.n_iterations,
        "seed": model.seed,
        "config": asdict(model.config) if model.config else None,
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> GmmModel:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read model file {path}: {exc}") from exc
    cfg = FitConfig(**payload["config"]) if payload.get("config") else None
    model = GmmModel(
        weights=np.asarray(payload["weights"], dtype=np.float64),
        means=np.asarray(payload["means"], dtype=np.float64),
        variances=np.asarray(payload["variances"], dtype=np.float64),
        log_likelihood=payload["log_likelihood"],
        n_iterations=payload["n_iterations"],
        seed=payload["seed"],
        config=cfg,
    )
    model.validate()
    return model

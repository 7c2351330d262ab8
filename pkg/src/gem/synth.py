"""Seeded synthetic-corpus generator: one CSV table per semantic type plus a
ground-truth file, for desk-scale experiments."""

from __future__ import annotations

import csv
import json
import zlib
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .errors import DataError

SUPPORTED_FAMILIES = (
    "normal", "uniform", "exponential", "lognormal", "gamma", "beta", "logistic",
)


@dataclass
class SynthType:
    label: str
    family: str
    params: dict
    n_columns: int
    n_rows: int
    header_prefix: str | None = None  # defaults to the label

    def __post_init__(self):
        if self.family not in SUPPORTED_FAMILIES:
            raise DataError(
                f"unknown distribution family {self.family!r}; "
                f"supported: {', '.join(SUPPORTED_FAMILIES)}"
            )
        if self.n_columns < 1 or self.n_rows < 1:
            raise DataError("n_columns and n_rows must be >= 1")


# Five well-separated families; pairwise two-sample KS distance between the
# type populations exceeds 0.5. Means stay away from zero because the cv
# feature (std/mean) is unstable for near-zero-mean columns.
DEFAULT_TYPES = [
    SynthType("score", "normal", {"loc": 5.0, "scale": 1.0}, 20, 500),
    SynthType("temperature", "normal", {"loc": 100.0, "scale": 5.0}, 20, 500),
    SynthType("rating", "uniform", {"low": 10.0, "high": 11.0}, 20, 500),
    SynthType("delay", "gamma", {"shape": 9.0, "scale": 1.0, "loc": 30.0}, 20, 500),
    SynthType("price", "lognormal", {"mean": 0.0, "sigma": 0.5, "loc": 60.0}, 20, 500),
]


def _draw(family: str, params: dict, n: int, rng: np.random.Generator) -> np.ndarray:
    loc = params.get("loc", 0.0)
    if family == "normal":
        return rng.normal(params.get("loc", 0.0), params.get("scale", 1.0), n)
    if family == "uniform":
        return rng.uniform(params.get("low", 0.0), params.get("high", 1.0), n)
    if family == "exponential":
        return rng.exponential(params.get("scale", 1.0), n) + loc
    if family == "lognormal":
        return rng.lognormal(params.get("mean", 0.0), params.get("sigma", 1.0), n) + loc
    if family == "gamma":
        return rng.gamma(params.get("shape", 1.0), params.get("scale", 1.0), n) + loc
    if family == "beta":
        return rng.beta(params.get("a", 1.0), params.get("b", 1.0), n) * params.get("scale", 1.0) + loc
    if family == "logistic":
        return rng.logistic(params.get("loc", 0.0), params.get("scale", 1.0), n)
    raise DataError(f"unknown distribution family {family!r}")


def load_synth_spec(path: str | Path) -> list[SynthType]:
    """Read a JSON list of type descriptions."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read synth spec {path}: {exc}") from exc
    if not isinstance(raw, list) or not raw:
        raise DataError("synth spec must be a non-empty JSON list")
    return [SynthType(**entry) for entry in raw]


def generate_corpus(types: list[SynthType], seed: int, out_dir: str | Path) -> Path:
    """Write one CSV per type plus ground_truth.csv and a manifest; returns
    the output directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    gt_rows: list[tuple[str, str, str]] = []
    for t in types:
        # crc32 keeps the per-type stream stable across interpreter runs
        rng = np.random.default_rng(
            np.random.SeedSequence([seed, zlib.crc32(t.label.encode("utf-8"))])
        )
        prefix = t.header_prefix or t.label
        headers = [f"{prefix}_{j}" for j in range(t.n_columns)]
        data = np.column_stack(
            [_draw(t.family, t.params, t.n_rows, rng) for _ in range(t.n_columns)]
        )
        with open(out / f"{t.label}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(headers)
            for row in data:
                writer.writerow([repr(float(v)) for v in row])
        gt_rows.extend((t.label, h, t.label) for h in headers)
    with open(out / "ground_truth.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["table", "column", "label"])
        writer.writerows(gt_rows)
    manifest = {"seed": seed, "types": [asdict(t) for t in types]}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return out

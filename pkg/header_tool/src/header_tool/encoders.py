"""Header encoders: a pretrained sentence encoder plus an offline fallback.

The default is a small pretrained sentence encoder loaded through
sentence-transformers. For air-gapped environments `--model hash` selects a
deterministic feature-hashing encoder that needs no checkpoint: headers are
lowercased, split on non-alphanumerics, and each token plus its character
trigrams is hashed into a signed bucket. String-similar headers share most
buckets, so related headers stay close without any learned weights.
"""

from __future__ import annotations

import hashlib
import re

import numpy as np

DEFAULT_MODEL = "sentence-transformers/all-MiniLM-L6-v2"
HASH_MODEL = "hash"

_TOKEN_RE = re.compile(r"[^0-9a-z]+")


class EncoderUnavailable(Exception):
    """The requested encoder cannot be loaded."""


class HashingEncoder:
    """Deterministic offline encoder via signed feature hashing."""

    def __init__(self, dim: int = 384):
        if dim < 8:
            raise ValueError("dim must be >= 8")
        self.dim = dim

    @property
    def name(self) -> str:
        return f"{HASH_MODEL}:{self.dim}"

    @staticmethod
    def _features(header: str) -> dict[str, float]:
        """Distinct features with weights: whole tokens count double so that
        a shared word outweighs incidental trigram overlap."""
        tokens = set(_TOKEN_RE.split(header.lower())) - {""} or {""}
        feats = {tok: 2.0 for tok in tokens}
        for tok in tokens:
            for i in range(max(len(tok) - 2, 1)):
                feats.setdefault(tok[i:i + 3], 1.0)
        return feats

    def _encode_one(self, header: str) -> np.ndarray:
        vec = np.zeros(self.dim)
        for feat, weight in self._features(header).items():
            digest = hashlib.sha256(feat.encode("utf-8")).digest()
            bucket = int.from_bytes(digest[:8], "little") % self.dim
            sign = 1.0 if digest[8] % 2 == 0 else -1.0
            vec[bucket] += sign * weight
        return vec

    def encode(self, headers: list[str], batch_size: int = 32) -> np.ndarray:
        return np.stack([self._encode_one(h) for h in headers])


class SentenceEncoder:
    """Thin wrapper over a sentence-transformers checkpoint."""

    def __init__(self, model_name: str):
        self.name = model_name
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise EncoderUnavailable(
                f"cannot load sentence encoder {model_name!r}: "
                f"sentence-transformers is not installed ({exc})"
            ) from exc
        try:
            self._model = SentenceTransformer(model_name)
        except Exception as exc:
            raise EncoderUnavailable(
                f"cannot load sentence encoder {model_name!r}: {exc}"
            ) from exc

    def encode(self, headers: list[str], batch_size: int = 32) -> np.ndarray:
        vectors = self._model.encode(
            headers, batch_size=batch_size, convert_to_numpy=True,
            normalize_embeddings=False, show_progress_bar=False,
        )
        return np.asarray(vectors, dtype=np.float64)


def load_encoder(model: str, hash_dim: int = 384):
    """Return an encoder for `model`; "hash" or "hash:DIM" selects the
    offline encoder, anything else is treated as a checkpoint name."""
    if model == HASH_MODEL:
        return HashingEncoder(hash_dim)
    if model.startswith(HASH_MODEL + ":"):
        return HashingEncoder(int(model.split(":", 1)[1]))
    return SentenceEncoder(model)

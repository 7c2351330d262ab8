"""Header-embedding export tool: encodes column headers with a sentence
encoder (or an offline hashing fallback) and writes the shared JSONL schema."""

from .encoders import (
    DEFAULT_MODEL, EncoderUnavailable, HashingEncoder, SentenceEncoder,
    load_encoder,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MODEL", "EncoderUnavailable", "HashingEncoder", "SentenceEncoder",
    "load_encoder", "__version__",
]

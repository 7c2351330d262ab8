"""Distributional embeddings for numeric table columns.

A pooled 1-D Gaussian mixture is fitted to all column values; each column is
summarized by its mean component responsibilities plus standardized summary
statistics, optionally composed with header embeddings, and evaluated with
cosine-neighbor precision and clustering metrics.
"""

from .columns import ColumnId, Corpus, GroundTruth, NumericColumn, load_corpus, load_ground_truth, pooled_stack
from .errors import DataError, GemError, NumericalError
from .gmm import FitConfig, GmmModel, fit, load_model, save_model, select_components_bic

__all__ = [
    "ColumnId", "Corpus", "GroundTruth", "NumericColumn",
    "load_corpus", "load_ground_truth", "pooled_stack",
    "DataError", "GemError", "NumericalError",
    "FitConfig", "GmmModel", "fit", "load_model", "save_model",
    "select_components_bic",
]

__version__ = "0.1.0"

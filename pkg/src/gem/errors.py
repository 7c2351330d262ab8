"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: usage errors -> 1, DataError -> 2,
NumericalError -> 3.
"""


class GemError(Exception):
    """Base class for all errors raised by this package."""


class DataError(GemError):
    """Invalid or inconsistent input data (CSV, JSONL, ground truth)."""


class NumericalError(GemError):
    """Numerical failure: underflow, degenerate fit, non-normalizable vector."""

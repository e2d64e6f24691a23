# src/sparsedfm/errors.py
"""Exception hierarchy shared by the library and the CLI."""

from typing import Optional


class SparseDfmError(Exception):
    """Base class for every error raised by sparsedfm"""


class DataError(SparseDfmError):
    """Custom exception for malformed or unusable input data"""

    def __init__(
        self,
        message: str,
        source: Optional[str] = None,
        row: Optional[int] = None,
        column: Optional[str] = None,
    ):
        self.message = message
        self.source = source
        self.row = row
        self.column = column
        super().__init__(str(self))

    def __str__(self):
        where = []
        if self.source:
            where.append(f"file '{self.source}'")
        if self.row is not None:
            where.append(f"row {self.row}")
        if self.column is not None:
            where.append(f"column '{self.column}'")
        if where:
            return f"Error in {', '.join(where)}: {self.message}"
        return self.message


class ModelError(SparseDfmError):
    """Invalid model configuration, dimensions or parameter values"""


class NumericalError(SparseDfmError):
    """Numerical failure during filtering or estimation"""

    def __init__(self, message: str, iteration: Optional[int] = None):
        self.message = message
        self.iteration = iteration
        super().__init__(str(self))

    def __str__(self):
        if self.iteration is not None:
            return f"{self.message} (EM iteration {self.iteration})"
        return self.message


class TuningError(SparseDfmError):
    """Factor-count or penalty tuning could not produce a usable result"""

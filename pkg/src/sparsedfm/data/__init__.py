# src/sparsedfm/data/__init__.py
from .imputation import Standardizer, fill_na, standardize
from .panel import (
    TimePanel,
    load_csv,
    matrix_frame,
    read_column_labels,
    read_column_spec,
    write_csv,
)
from .transforms import (
    TransformCode,
    missing_runs,
    missing_summary,
    ragged_edge,
    transform_data,
    undifference,
)

__all__ = [
    "Standardizer",
    "TimePanel",
    "TransformCode",
    "fill_na",
    "load_csv",
    "matrix_frame",
    "missing_runs",
    "missing_summary",
    "read_column_labels",
    "read_column_spec",
    "ragged_edge",
    "standardize",
    "transform_data",
    "undifference",
    "write_csv",
]

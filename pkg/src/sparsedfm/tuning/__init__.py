# src/sparsedfm/tuning/__init__.py
from .alpha import AlphaPath, alpha_grid_search, bic_alpha, has_zero_column, logspace
from .factors import IcTable, default_r_max, tune_factors

__all__ = [
    "AlphaPath",
    "IcTable",
    "alpha_grid_search",
    "bic_alpha",
    "default_r_max",
    "has_zero_column",
    "logspace",
    "tune_factors",
]

# src/sparsedfm/__init__.py
"""sparsedfm - dynamic factor models with sparse loadings.

Estimation runs on a Kalman filter/smoother E-step and closed-form M-steps;
EM-sparse adds an L1 penalty on the loadings solved by ADMM.
"""

__version__ = "0.1.0"

from .config.options import Alg, ErrorModel, FitConfig, KalmanEngine
from .data import TimePanel, load_csv, write_csv
from .estimators import EmLog, FitResult, em_fit, two_stage
from .model.api import fitted, predict_h, residuals, sparse_dfm_fit, summary
from .tuning import alpha_grid_search, tune_factors

__all__ = [
    "Alg",
    "EmLog",
    "ErrorModel",
    "FitConfig",
    "FitResult",
    "KalmanEngine",
    "TimePanel",
    "alpha_grid_search",
    "em_fit",
    "fitted",
    "load_csv",
    "predict_h",
    "residuals",
    "sparse_dfm_fit",
    "summary",
    "tune_factors",
    "two_stage",
    "write_csv",
]

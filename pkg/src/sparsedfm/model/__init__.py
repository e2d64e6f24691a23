# src/sparsedfm/model/__init__.py
from ..config.options import FitConfig
from ..estimators.result import FitResult
from .api import (
    Forecast,
    fitted,
    predict_h,
    refilter,
    residuals,
    sparse_dfm_fit,
    summary,
)

__all__ = [
    "FitConfig",
    "FitResult",
    "Forecast",
    "fitted",
    "predict_h",
    "refilter",
    "residuals",
    "sparse_dfm_fit",
    "summary",
]

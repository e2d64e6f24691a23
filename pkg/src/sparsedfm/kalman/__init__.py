# src/sparsedfm/kalman/__init__.py
from .base import KfsInput, KfsOutput, KalmanSmoother, kalman_engine
from .multivariate import kalman_multivariate, woodbury_inverse, woodbury_logdet
from .registry import EngineRegistry, get_registry, run_kfs
from .univariate import kalman_univariate

__all__ = [
    "EngineRegistry",
    "KalmanSmoother",
    "KfsInput",
    "KfsOutput",
    "get_registry",
    "kalman_engine",
    "kalman_multivariate",
    "kalman_univariate",
    "run_kfs",
    "woodbury_inverse",
    "woodbury_logdet",
]

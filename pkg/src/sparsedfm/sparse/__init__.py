# src/sparsedfm/sparse/__init__.py
from .admm import (
    AdmmHistory,
    AdmmState,
    admm_lambda_primal,
    admm_solve,
    penalty,
    soft_threshold,
)

__all__ = [
    "AdmmHistory",
    "AdmmState",
    "admm_lambda_primal",
    "admm_solve",
    "penalty",
    "soft_threshold",
]

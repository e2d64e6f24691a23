# src/sparsedfm/estimators/__init__.py
from .em import em_converged, em_fit, pca_fit, smooth_with_params, two_stage
from .mstep import (
    floor_eigenvalues,
    m_step_ar1,
    m_step_lambda_dense,
    m_step_sigma_eps,
    m_step_transition,
)
from .pca import PcaStart, fit_var1, init_ar1, init_params, pca_estimate, pca_start
from .result import EmLog, EmState, FitResult, build_result, prepare_panel

__all__ = [
    "EmLog",
    "EmState",
    "FitResult",
    "PcaStart",
    "build_result",
    "em_converged",
    "em_fit",
    "fit_var1",
    "floor_eigenvalues",
    "init_ar1",
    "init_params",
    "m_step_ar1",
    "m_step_lambda_dense",
    "m_step_sigma_eps",
    "m_step_transition",
    "pca_estimate",
    "pca_fit",
    "pca_start",
    "prepare_panel",
    "smooth_with_params",
    "two_stage",
]

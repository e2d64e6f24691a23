# src/sparsedfm/estimators/mstep.py
"""Closed-form M-step updates from smoothed state moments."""

import logging
from typing import Optional, Tuple

import numpy as np

from ..errors import DataError, NumericalError
from ..kalman.base import symmetrize
from ..statespace.moments import LoadingsSystem, SmoothedMoments, loadings_system
from ..statespace.params import Ar1Params

logger = logging.getLogger(__name__)

SIGMA_EPS_FLOOR = 1e-8
PHI_CLIP = 0.99
SIGMA_U_EIG_FLOOR = 1e-10


def floor_eigenvalues(M: np.ndarray, floor: float = SIGMA_U_EIG_FLOOR) -> np.ndarray:
    """Symmetrize and raise every eigenvalue to at least ``floor``."""
    M = symmetrize(M)
    w, V = np.linalg.eigh(M)
    if w.min() >= floor:
        return M
    return symmetrize((V * np.maximum(w, floor)) @ V.T)


def m_step_transition(moments: SmoothedMoments) -> Tuple[np.ndarray, np.ndarray]:
    """Â = (ΣS_{t,t−1|n})(ΣS_{t−1|n})⁻¹, Σ̂_u = n⁻¹Σ[S_{t|n} − ÂS_{t,t−1|n}ᵀ].

    Raises:
        NumericalError: ΣS_{t−1|n} is singular
    """
    sum_lag = moments.S_lag.sum(axis=0)
    sum_prev = moments.sum_prev()
    try:
        A = np.linalg.solve(sum_prev.T, sum_lag.T).T
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"sum of lagged second moments is singular: {e}") from e
    Sigma_u = (moments.S_t.sum(axis=0) - A @ sum_lag.T) / moments.n
    return A, floor_eigenvalues(Sigma_u)


def _require_observed(system: LoadingsSystem):
    never = np.flatnonzero(system.n_obs == 0)
    if never.size:
        raise DataError(f"series #{never[0] + 1} is never observed")


def solve_loadings(system: LoadingsSystem) -> np.ndarray:
    _require_observed(system)
    try:
        return np.linalg.solve(system.gram, system.rhs[..., None])[..., 0]
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"loadings system is singular: {e}") from e


def m_step_lambda_dense(
    X: np.ndarray,
    mask: np.ndarray,
    moments: SmoothedMoments,
    cross: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Unpenalised loadings: p independent r×r solves, one per series."""
    return solve_loadings(loadings_system(X, mask, moments, cross))


def m_step_sigma_eps(
    X: np.ndarray,
    mask: np.ndarray,
    moments: SmoothedMoments,
    Lambda_new: np.ndarray,
    sigma_eps_prev: np.ndarray,
) -> np.ndarray:
    """Idiosyncratic variances with the previous value carried into missing cells."""
    system = loadings_system(X, mask, moments)
    Xw = np.where(mask, X, 0.0)
    sq = (Xw**2).sum(axis=0)
    cross_term = (Lambda_new * system.rhs).sum(axis=1)
    quad = np.einsum("ij,ijk,ik->i", Lambda_new, system.gram, Lambda_new)
    n_missing = moments.n - system.n_obs
    sigma = (sq - 2.0 * cross_term + quad + n_missing * sigma_eps_prev) / moments.n
    return np.maximum(sigma, SIGMA_EPS_FLOOR)


def m_step_ar1(moments: SmoothedMoments, kappa: float) -> Ar1Params:
    """φ_i and σ_e,i from the idiosyncratic block of the augmented moments."""
    lag = np.diagonal(moments.S_lag, axis1=1, axis2=2).sum(axis=0)
    prev = np.diagonal(moments.sum_prev())
    curr = np.diagonal(moments.S_t, axis1=1, axis2=2).sum(axis=0)
    phi = np.clip(lag / prev, -PHI_CLIP, PHI_CLIP)
    sigma_e = np.maximum((curr - phi * lag) / moments.n, SIGMA_EPS_FLOOR)
    return Ar1Params(phi=phi, sigma_e=sigma_e, kappa=kappa)

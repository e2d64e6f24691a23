# src/sparsedfm/estimators/pca.py
"""Principal-components estimation and EM starting values."""

import logging
from typing import NamedTuple, Tuple

import numpy as np

from ..data.imputation import fill_na
from ..data.panel import TimePanel
from ..errors import ModelError, NumericalError
from ..statespace.params import (
    Ar1Params,
    DfmParams,
    shrink_to_stationary,
    solve_lyapunov,
)
from .mstep import PHI_CLIP, SIGMA_EPS_FLOOR, floor_eigenvalues

logger = logging.getLogger(__name__)


def _flip_signs(Lambda: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of every column positive."""
    idx = np.argmax(np.abs(Lambda), axis=0)
    signs = np.sign(Lambda[idx, np.arange(Lambda.shape[1])])
    signs[signs == 0] = 1.0
    return Lambda * signs


def pca_estimate(X: np.ndarray, r: int) -> Tuple[np.ndarray, np.ndarray]:
    """Loadings and factors under ΛᵀΛ/p = I.

    Args:
        X: Complete n×p matrix (fill gaps first)
        r: Number of factors, 1 <= r < min(n, p)

    Returns:
        (Lambda p×r, F n×r) with F_t = Λᵀx_t / p
    """
    X = np.asarray(X, dtype=float)
    n, p = X.shape
    if not 1 <= r < min(n, p):
        raise ModelError(f"r must satisfy 1 <= r < min(n, p) = {min(n, p)}, got {r}")
    if np.isnan(X).any():
        raise ModelError("PCA needs a complete matrix; fill missing cells first")
    try:
        eigvals, eigvecs = np.linalg.eigh(X.T @ X / n)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"eigendecomposition failed: {e}") from e
    top = eigvecs[:, np.argsort(eigvals)[::-1][:r]]
    Lambda = _flip_signs(np.sqrt(p) * top)
    F = X @ Lambda / p
    return Lambda, F


class PcaStart(NamedTuple):
    params: DfmParams
    balanced: np.ndarray
    factors: np.ndarray


def fit_var1(F: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Least-squares VAR(1) without intercept: (A, residual covariance)."""
    prev, curr = F[:-1], F[1:]
    A = np.linalg.lstsq(prev, curr, rcond=None)[0].T
    resid = curr - prev @ A.T
    Sigma_u = resid.T @ resid / max(len(resid) - 1, 1)
    return A, Sigma_u


def pca_start(panel: TimePanel, r: int) -> PcaStart:
    balanced, mask = fill_na(panel)
    Lambda, F = pca_estimate(balanced, r)

    resid = np.where(mask, balanced - F @ Lambda.T, np.nan)
    sigma_eps = np.maximum(np.nanvar(resid, axis=0, ddof=1), SIGMA_EPS_FLOOR)

    A, Sigma_u = fit_var1(F)
    A = shrink_to_stationary(A)
    Sigma_u = floor_eigenvalues(Sigma_u)
    P0 = solve_lyapunov(A, Sigma_u)

    params = DfmParams(
        Lambda=Lambda,
        A=A,
        Sigma_u=Sigma_u,
        sigma_eps=sigma_eps,
        alpha0=np.zeros(r),
        P0=P0,
    )
    return PcaStart(params, balanced, F)


def init_params(panel: TimePanel, r: int) -> DfmParams:
    """Starting values: PCA loadings/factors, a VAR(1) on the factors,
    α₀ = 0 and P₀ from the stationary Lyapunov equation."""
    return pca_start(panel, r).params


def init_ar1(start: PcaStart) -> Ar1Params:
    """AR(1) coefficients from lag-one autocorrelations of the PCA residuals."""
    params = start.params
    e = start.balanced - start.factors @ params.Lambda.T
    e = e - e.mean(axis=0)
    num = (e[1:] * e[:-1]).sum(axis=0)
    den = (e**2).sum(axis=0)
    phi = np.clip(
        np.divide(num, den, out=np.zeros_like(num), where=den > 0),
        -PHI_CLIP,
        PHI_CLIP,
    )
    sigma_e = np.maximum(e.var(axis=0, ddof=1) * (1.0 - phi**2), SIGMA_EPS_FLOOR)
    return Ar1Params(phi=phi, sigma_e=sigma_e)

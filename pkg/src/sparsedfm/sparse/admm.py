# src/sparsedfm/sparse/admm.py
"""ADMM for the L1-penalised loadings update inside EM."""

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ..errors import ModelError
from ..statespace.moments import LoadingsSystem, SmoothedMoments, loadings_system

logger = logging.getLogger(__name__)

NU = 1.0
MAX_ITER = 200
EPS_ABS = 1e-6
EPS_REL = 1e-6


@dataclass(frozen=True)
class AdmmHistory:
    r_norm: Tuple[float, ...] = ()
    s_norm: Tuple[float, ...] = ()
    eps_pri: Tuple[float, ...] = ()
    eps_dual: Tuple[float, ...] = ()


@dataclass(frozen=True)
class AdmmState:
    """Primal Λ, split variable Z, scaled multipliers U and the solve record.

    Rows ``[:q]`` are never thresholded.
    """

    Lambda: np.ndarray
    Z: np.ndarray
    U: np.ndarray
    nu: float = NU
    q: int = 0
    history: AdmmHistory = field(default_factory=AdmmHistory)
    iterations: int = 0
    converged: bool = False

    def __post_init__(self):
        if not self.nu > 0:
            raise ModelError("nu must be positive")
        if not 0 <= self.q <= self.Z.shape[0]:
            raise ModelError(f"q must lie in [0, {self.Z.shape[0]}], got {self.q}")


def soft_threshold(M: np.ndarray, t: float) -> np.ndarray:
    """sign(m)·max(|m| − t, 0), elementwise."""
    if t < 0:
        raise ModelError(f"threshold must be nonnegative, got {t}")
    M = np.asarray(M, dtype=float)
    return np.sign(M) * np.maximum(np.abs(M) - t, 0.0)


def _primal(
    system: LoadingsSystem,
    weights: np.ndarray,
    Z: np.ndarray,
    U: np.ndarray,
    nu: float,
) -> np.ndarray:
    r = Z.shape[1]
    lhs = system.gram * weights[:, None, None] + nu * np.eye(r)
    rhs = system.rhs * weights[:, None] + nu * (Z - U)
    return np.linalg.solve(lhs, rhs[..., None])[..., 0]


def admm_lambda_primal(
    X: np.ndarray,
    mask: np.ndarray,
    moments: SmoothedMoments,
    sigma_eps: np.ndarray,
    Z: np.ndarray,
    U: np.ndarray,
    nu: float = NU,
    cross: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Row-wise ridge-type solve
    (σ_i⁻²ΣS_{t|n} + νI)Λ_iᵀ = σ_i⁻²ΣX_{it}a_{t|n} + ν(Z_i − U_i)ᵀ.

    ``sigma_eps`` holds variances, so σ_i⁻² is ``1 / sigma_eps[i]``.
    """
    if (np.asarray(sigma_eps) <= 0).any():
        raise ModelError("sigma_eps must be strictly positive")
    system = loadings_system(X, mask, moments, cross)
    return _primal(system, 1.0 / np.asarray(sigma_eps), Z, U, nu)


def admm_solve(
    X: np.ndarray,
    mask: np.ndarray,
    moments: SmoothedMoments,
    sigma_eps: np.ndarray,
    alpha: float,
    q: int = 0,
    warm: Optional[AdmmState] = None,
    cross: Optional[np.ndarray] = None,
    nu: float = NU,
    max_iter: int = MAX_ITER,
) -> Tuple[np.ndarray, AdmmState]:
    """Minimise −E[log L] + α‖Λ_{q:}‖₁ over the loadings.

    Returns:
        (Z, state); Z carries exact zeros. A non-converged solve is flagged
        on the state, not raised.
    """
    if alpha < 0:
        raise ModelError(f"alpha must be nonnegative, got {alpha}")
    system = loadings_system(X, mask, moments, cross)
    weights = 1.0 / np.asarray(sigma_eps, dtype=float)
    p, r = system.rhs.shape
    if not 0 <= q <= p:
        raise ModelError(f"q must lie in [0, {p}], got {q}")

    if warm is not None and warm.Z.shape == (p, r):
        Z, U = warm.Z.copy(), warm.U.copy()
    else:
        Z, U = np.zeros((p, r)), np.zeros((p, r))

    sqrt_pr = np.sqrt(p * r)
    r_hist, s_hist, pri_hist, dual_hist = [], [], [], []
    converged = False
    Lambda = Z
    k = 0
    for k in range(1, max_iter + 1):
        Lambda = _primal(system, weights, Z, U, nu)
        Z_old = Z
        V = Lambda + U
        Z = V.copy()
        Z[q:] = soft_threshold(V[q:], alpha / nu)
        U = U + Lambda - Z

        r_norm = np.linalg.norm(Lambda - Z)
        s_norm = nu * np.linalg.norm(Z - Z_old)
        eps_pri = sqrt_pr * EPS_ABS + EPS_REL * max(
            np.linalg.norm(Lambda), np.linalg.norm(Z)
        )
        eps_dual = sqrt_pr * EPS_ABS + EPS_REL * nu * np.linalg.norm(U)
        r_hist.append(r_norm)
        s_hist.append(s_norm)
        pri_hist.append(eps_pri)
        dual_hist.append(eps_dual)
        if r_norm < eps_pri and s_norm < eps_dual:
            converged = True
            break

    if not converged:
        logger.debug("ADMM stopped at the %d-iteration cap", max_iter)
    else:
        logger.debug("ADMM converged in %d iterations", k)

    state = AdmmState(
        Lambda=Lambda,
        Z=Z,
        U=U,
        nu=nu,
        q=q,
        history=AdmmHistory(
            tuple(r_hist), tuple(s_hist), tuple(pri_hist), tuple(dual_hist)
        ),
        iterations=k,
        converged=converged,
    )
    return Z, state


def penalty(Lambda: np.ndarray, alpha: float, q: int = 0) -> float:
    """α‖Λ_{q:}‖₁"""
    return float(alpha * np.abs(Lambda[q:]).sum())

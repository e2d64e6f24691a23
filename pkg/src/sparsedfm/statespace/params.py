# src/sparsedfm/statespace/params.py
"""Model parameters and the AR(1) state augmentation."""

import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.linalg import block_diag

from ..errors import ModelError, NumericalError

logger = logging.getLogger(__name__)

__all__ = [
    "Ar1Params",
    "AugmentedSystem",
    "DfmParams",
    "build_ar1_augmented",
    "shrink_to_stationary",
    "solve_lyapunov",
    "spectral_norm",
]

KAPPA_DEFAULT = 1e-8
STATIONARY_NORM = 0.99


def _symmetric(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def spectral_norm(A: np.ndarray) -> float:
    return float(np.linalg.norm(A, 2)) if A.size else 0.0


def shrink_to_stationary(
    A: np.ndarray, target: float = STATIONARY_NORM
) -> np.ndarray:
    """Rescale A to spectral norm ``target`` when it is not below one."""
    norm = spectral_norm(A)
    if norm >= 1.0:
        logger.warning("Transition matrix norm %.4f >= 1, rescaled to %s", norm, target)
        return A * (target / norm)
    return A


def solve_lyapunov(A: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Stationary covariance P = APAᵀ + Q via vec(P) = (I − A⊗A)⁻¹vec(Q).

    Raises:
        NumericalError: I − A⊗A is singular (A has a unit-modulus eigenvalue pair)
    """
    m = A.shape[0]
    lhs = np.eye(m * m) - np.kron(A, A)
    try:
        vec = np.linalg.solve(lhs, Q.reshape(-1))
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"Lyapunov system is singular: {e}") from e
    return _symmetric(vec.reshape(m, m))


@dataclass(frozen=True)
class DfmParams:
    """θ = (Λ, A, Σ_u, diag Σ_ε) plus the initial state mean and covariance."""

    Lambda: np.ndarray
    A: np.ndarray
    Sigma_u: np.ndarray
    sigma_eps: np.ndarray
    alpha0: np.ndarray
    P0: np.ndarray

    def __post_init__(self):
        Lambda = np.atleast_2d(np.asarray(self.Lambda, dtype=float))
        p, r = Lambda.shape
        shapes = {
            "A": (r, r),
            "Sigma_u": (r, r),
            "sigma_eps": (p,),
            "alpha0": (r,),
            "P0": (r, r),
        }
        arrays = {"Lambda": Lambda}
        for name, shape in shapes.items():
            value = np.asarray(getattr(self, name), dtype=float)
            if value.size != int(np.prod(shape)):
                raise ModelError(f"{name} must have shape {shape}, got {value.shape}")
            value = value.reshape(shape)
            arrays[name] = value
        if (arrays["sigma_eps"] <= 0).any():
            raise ModelError("sigma_eps must be strictly positive")
        for name, value in arrays.items():
            if not np.isfinite(value).all():
                raise NumericalError(f"{name} contains non-finite values")
            object.__setattr__(self, name, value)

    @property
    def p(self) -> int:
        return self.Lambda.shape[0]

    @property
    def r(self) -> int:
        return self.Lambda.shape[1]

    def replace(self, **changes) -> "DfmParams":
        return replace(self, **changes)

    def is_stationary(self) -> bool:
        return spectral_norm(self.A) < 1.0


@dataclass(frozen=True)
class Ar1Params:
    """Idiosyncratic AR(1) coefficients, innovation variances and jitter κ."""

    phi: np.ndarray
    sigma_e: np.ndarray
    kappa: float = KAPPA_DEFAULT

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float).reshape(-1)
        sigma_e = np.asarray(self.sigma_e, dtype=float).reshape(-1)
        if phi.shape != sigma_e.shape:
            raise ModelError("phi and sigma_e must have the same length")
        if (np.abs(phi) >= 1).any():
            raise ModelError("every |phi| must be below 1")
        if (sigma_e <= 0).any():
            raise ModelError("sigma_e must be strictly positive")
        if not self.kappa > 0:
            raise ModelError("kappa must be positive")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "sigma_e", sigma_e)

    @property
    def stationary_variance(self) -> np.ndarray:
        return self.sigma_e / (1.0 - self.phi**2)


@dataclass(frozen=True)
class AugmentedSystem:
    """State space with the factors and the p AR(1) errors stacked."""

    Lambda_aug: np.ndarray
    A_aug: np.ndarray
    Sigma_u_aug: np.ndarray
    sigma_meas: np.ndarray
    alpha0_aug: np.ndarray
    P0_aug: np.ndarray

    @property
    def m(self) -> int:
        return self.A_aug.shape[0]


def build_ar1_augmented(
    params: DfmParams,
    ar1: Ar1Params,
    e0: Optional[np.ndarray] = None,
    Pe0: Optional[np.ndarray] = None,
) -> AugmentedSystem:
    """Stack F_t and e_t: Λ̃ = [Λ | I], Ã = diag(A, diag φ), Σ_ũ = diag(Σ_u, diag σ_e).

    The idiosyncratic block of the initial state defaults to zero mean and
    the AR(1) stationary variances.
    """
    p, r = params.Lambda.shape
    if ar1.phi.shape != (p,):
        raise ModelError(f"AR(1) block has {ar1.phi.size} series, loadings have {p}")

    e0 = np.zeros(p) if e0 is None else np.asarray(e0, dtype=float)
    Pe0 = np.diag(ar1.stationary_variance) if Pe0 is None else np.asarray(Pe0)
    if e0.shape != (p,) or Pe0.shape != (p, p):
        raise ModelError("initial idiosyncratic state has the wrong shape")

    return AugmentedSystem(
        Lambda_aug=np.hstack([params.Lambda, np.eye(p)]),
        A_aug=block_diag(params.A, np.diag(ar1.phi)),
        Sigma_u_aug=block_diag(params.Sigma_u, np.diag(ar1.sigma_e)),
        sigma_meas=np.full(p, ar1.kappa),
        alpha0_aug=np.concatenate([params.alpha0, e0]),
        P0_aug=block_diag(params.P0, Pe0),
    )

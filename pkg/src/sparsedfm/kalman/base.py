# src/sparsedfm/kalman/base.py
"""Shared types and helpers for the Kalman filter/smoother engines."""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np
import pandas as pd

from ..errors import ModelError, NumericalError
from ..statespace.params import AugmentedSystem, DfmParams

logger = logging.getLogger(__name__)

PINV_RCOND = 1e-12


def symmetrize(M: np.ndarray) -> np.ndarray:
    """(M + Mᵀ)/2 over the last two axes."""
    return 0.5 * (M + np.swapaxes(M, -1, -2))


@dataclass(frozen=True)
class KfsInput:
    """Everything a filter pass needs; ``m`` is r (IID) or r + p (AR1)."""

    X: np.ndarray
    mask: np.ndarray
    Lambda: np.ndarray
    A: np.ndarray
    Sigma_u: np.ndarray
    sigma_eps: np.ndarray
    alpha0: np.ndarray
    P0: np.ndarray

    def __post_init__(self):
        arrays = {
            name: np.ascontiguousarray(getattr(self, name), dtype=float)
            for name in ("X", "Lambda", "A", "Sigma_u", "sigma_eps", "alpha0", "P0")
        }
        mask = np.ascontiguousarray(self.mask, dtype=bool)
        n, p = arrays["X"].shape
        m = arrays["A"].shape[0]
        expected = {
            "Lambda": (p, m),
            "A": (m, m),
            "Sigma_u": (m, m),
            "sigma_eps": (p,),
            "alpha0": (m,),
            "P0": (m, m),
        }
        for name, shape in expected.items():
            if arrays[name].shape != shape:
                raise ModelError(
                    f"{name} has shape {arrays[name].shape}, expected {shape}"
                )
        if mask.shape != (n, p):
            raise ModelError("mask shape does not match X")
        if (arrays["sigma_eps"] <= 0).any():
            raise ModelError("measurement variances must be strictly positive")
        if np.linalg.eigvalsh(symmetrize(arrays["P0"])).min() < -1e-10:
            raise ModelError("P0 must be positive semidefinite")
        # Missing cells are never read; zero them so they cannot leak
        arrays["X"] = np.where(mask, arrays["X"], 0.0)
        for name, value in arrays.items():
            object.__setattr__(self, name, value)
        object.__setattr__(self, "mask", mask)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @classmethod
    def from_params(
        cls, X: np.ndarray, mask: np.ndarray, params: DfmParams
    ) -> "KfsInput":
        return cls(
            X=X,
            mask=mask,
            Lambda=params.Lambda,
            A=params.A,
            Sigma_u=params.Sigma_u,
            sigma_eps=params.sigma_eps,
            alpha0=params.alpha0,
            P0=params.P0,
        )

    @classmethod
    def from_augmented(
        cls, X: np.ndarray, mask: np.ndarray, system: AugmentedSystem
    ) -> "KfsInput":
        return cls(
            X=X,
            mask=mask,
            Lambda=system.Lambda_aug,
            A=system.A_aug,
            Sigma_u=system.Sigma_u_aug,
            sigma_eps=system.sigma_meas,
            alpha0=system.alpha0_aug,
            P0=system.P0_aug,
        )


@dataclass(frozen=True)
class KfsOutput:
    """Filtered/smoothed moments; row t of each array is time t + 1."""

    a_pred: np.ndarray
    P_pred: np.ndarray
    a_filt: np.ndarray
    P_filt: np.ndarray
    a_smooth: np.ndarray
    P_smooth: np.ndarray
    P_lag_smooth: np.ndarray
    a0_smooth: np.ndarray
    P0_smooth: np.ndarray
    loglik: float
    engine: str = ""

    def to_frames(self) -> Dict[str, pd.DataFrame]:
        """Flat tables for CSV dumps: means, then covariance diagonals."""
        m = self.a_smooth.shape[1]
        states = [f"s{j + 1}" for j in range(m)]

        def diag(P: np.ndarray) -> np.ndarray:
            return np.diagonal(P, axis1=1, axis2=2)

        frames = {
            "kfs_a_filt": pd.DataFrame(self.a_filt, columns=states),
            "kfs_a_smooth": pd.DataFrame(self.a_smooth, columns=states),
            "kfs_P_filt_diag": pd.DataFrame(diag(self.P_filt), columns=states),
            "kfs_P_smooth_diag": pd.DataFrame(diag(self.P_smooth), columns=states),
            "kfs_P_lag_diag": pd.DataFrame(diag(self.P_lag_smooth), columns=states),
        }
        frames["kfs_loglik"] = pd.DataFrame({"loglik": [self.loglik]})
        return frames


def solve_psd(P: np.ndarray, B: np.ndarray) -> np.ndarray:
    """P⁻¹B, falling back to a pseudo-inverse (rcond 1e-12) when P is singular."""
    try:
        X = np.linalg.solve(P, B)
        if np.isfinite(X).all():
            return X
    except np.linalg.LinAlgError:
        pass
    logger.debug("Singular predicted covariance, using pseudo-inverse")
    return np.linalg.pinv(P, rcond=PINV_RCOND, hermitian=True) @ B


def smoother_gains(
    A: np.ndarray, P0: np.ndarray, P_pred: np.ndarray, P_filt: np.ndarray
) -> np.ndarray:
    """J_t = P_{t|t} Aᵀ P_{t+1|t}⁻¹ for t = 0..n−1 (J[0] uses P0)."""
    P_prev = np.concatenate([P0[None], P_filt[:-1]], axis=0)
    AP = A @ P_prev
    try:
        Jt = np.linalg.solve(P_pred, AP)
        if not np.isfinite(Jt).all():
            raise np.linalg.LinAlgError("non-finite gain")
    except np.linalg.LinAlgError:
        Jt = np.stack([solve_psd(P_pred[t], AP[t]) for t in range(len(AP))])
    return np.swapaxes(Jt, 1, 2)


def check_loglik(loglik: float) -> float:
    if not np.isfinite(loglik):
        raise NumericalError("log-likelihood is not finite")
    return float(loglik)


class KalmanSmoother(ABC):
    """Base class for filter/smoother engines."""

    def __init__(self, name: str, description: str):
        self.name = name
        self.description = description

    @abstractmethod
    def run(self, inp: KfsInput) -> KfsOutput:
        """Filter and smooth one input."""


class FunctionSmoother(KalmanSmoother):
    """Engine backed by a plain function."""

    def __init__(
        self,
        func: Callable[[KfsInput], KfsOutput],
        name: Optional[str] = None,
        description: Optional[str] = None,
    ):
        self.func = func
        self.name = name or func.__name__
        self.description = description or func.__doc__ or ""

    def run(self, inp: KfsInput) -> KfsOutput:
        return self.func(inp)


def kalman_engine(name: str, description: Optional[str] = None) -> Callable:
    """Mark a function as a filter/smoother engine for the registry.

    Example:
        @kalman_engine("multivariate")
        def kalman_multivariate(inp: KfsInput) -> KfsOutput:
            ...
    """

    def decorator(func: Callable) -> Callable:
        func._engine_name = name
        func._engine_description = description or (func.__doc__ or "").strip()
        func._is_engine = True
        return func

    return decorator

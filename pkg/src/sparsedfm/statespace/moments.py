# src/sparsedfm/statespace/moments.py
"""Smoothed state moments and the row-wise loadings equations built from them.

Shared by the dense M-step and the ADMM loadings solver.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from ..kalman.base import KfsOutput, symmetrize

__all__ = ["LoadingsSystem", "SmoothedMoments", "loadings_system"]


@dataclass(frozen=True)
class SmoothedMoments:
    """S_{t|n} = a_{t|n}a_{t|n}ᵀ + P_{t|n} and S_{t,t−1|n}, t = 1..n.

    ``S_0`` and ``a0`` describe the smoothed initial state t = 0.
    """

    S_t: np.ndarray
    S_lag: np.ndarray
    a: np.ndarray
    a0: np.ndarray
    S_0: np.ndarray

    @classmethod
    def from_kfs(cls, kfs: KfsOutput) -> "SmoothedMoments":
        a = kfs.a_smooth
        a_prev = np.vstack([kfs.a0_smooth[None], a[:-1]])
        S_t = symmetrize(np.einsum("ti,tj->tij", a, a) + kfs.P_smooth)
        S_lag = np.einsum("ti,tj->tij", a, a_prev) + kfs.P_lag_smooth
        S_0 = symmetrize(np.outer(kfs.a0_smooth, kfs.a0_smooth) + kfs.P0_smooth)
        return cls(S_t=S_t, S_lag=S_lag, a=a, a0=kfs.a0_smooth, S_0=S_0)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def block(self, idx: np.ndarray) -> "SmoothedMoments":
        """Moments of the state components ``idx``."""
        ix = np.ix_(idx, idx)
        return SmoothedMoments(
            S_t=self.S_t[(slice(None),) + ix],
            S_lag=self.S_lag[(slice(None),) + ix],
            a=self.a[:, idx],
            a0=self.a0[idx],
            S_0=self.S_0[ix],
        )

    def sum_prev(self) -> np.ndarray:
        """Σ_{t=1..n} S_{t−1|n}."""
        return self.S_0 + self.S_t[:-1].sum(axis=0)


class LoadingsSystem(NamedTuple):
    """Per-series normal equations gram[i] Λ_iᵀ = rhs[i] over observed t."""

    gram: np.ndarray
    rhs: np.ndarray
    n_obs: np.ndarray


def loadings_system(
    X: np.ndarray,
    mask: np.ndarray,
    moments: SmoothedMoments,
    cross: Optional[np.ndarray] = None,
) -> LoadingsSystem:
    """Assemble the row-wise loadings equations.

    Args:
        X: n×p data (missing cells ignored)
        mask: n×p observation mask
        moments: Factor-block moments
        cross: Optional n×p×r array E[F_t e_{i,t}] subtracted from the
            right-hand side (AR(1) errors)
    """
    W = np.asarray(mask, dtype=float)
    Xw = np.where(mask, X, 0.0)
    gram = np.einsum("ti,tjk->ijk", W, moments.S_t)
    rhs = Xw.T @ moments.a
    if cross is not None:
        rhs = rhs - np.einsum("ti,tij->ij", W, cross)
    return LoadingsSystem(gram, rhs, W.sum(axis=0))

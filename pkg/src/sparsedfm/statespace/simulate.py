# src/sparsedfm/statespace/simulate.py
"""Seeded simulation of exact dynamic factor models.

Draws come from ``numpy.random.Generator(PCG64(seed))`` in a fixed order:
loadings (row-major, only when not supplied), initial factor, then for each
t the factor innovation followed by the idiosyncratic innovation, and
finally the missing-cell selection.
"""

import logging
from typing import NamedTuple, Optional

import numpy as np

from ..data.panel import TimePanel
from ..errors import ModelError
from .params import Ar1Params, DfmParams, solve_lyapunov

logger = logging.getLogger(__name__)

__all__ = ["SimulatedPanel", "block_sparse_loadings", "make_rng", "simulate_dfm"]

A_COEF = 0.8


class SimulatedPanel(NamedTuple):
    panel: TimePanel
    params: DfmParams
    factors: np.ndarray
    ar1: Optional[Ar1Params] = None


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def block_sparse_loadings(
    p: int, r: int, rng: np.random.Generator, low: float = 0.5, high: float = 1.5
) -> np.ndarray:
    """Split the p series into r contiguous blocks, each loading on one factor.

    Nonzero magnitudes are uniform on [low, high] with random signs.
    """
    if not 1 <= r <= p:
        raise ModelError(f"need 1 <= r <= p, got r={r}, p={p}")
    Lambda = np.zeros((p, r))
    blocks = np.array_split(np.arange(p), r)
    for j, rows in enumerate(blocks):
        size = rows.size
        Lambda[rows, j] = rng.uniform(low, high, size) * rng.choice([-1.0, 1.0], size)
    return Lambda


def simulate_dfm(
    n: int,
    p: int,
    r: int,
    seed: int = 0,
    missing_frac: float = 0.0,
    loadings: Optional[np.ndarray] = None,
    phi: Optional[np.ndarray] = None,
    a_coef: float = A_COEF,
) -> SimulatedPanel:
    """Simulate X_t = ΛF_t + ε_t with F_t = aF_{t−1} + u_t.

    Defaults: Λ ~ N(0, 1), Σ_ε = I, A = 0.8·I, Σ_u = (1 − 0.8²)·I and F_0 drawn
    from the stationary distribution. With ``phi`` the idiosyncratic errors
    follow AR(1) with unit stationary variance.

    Raises:
        ModelError: Invalid dimensions or missing fraction
    """
    if n < 10:
        raise ModelError(f"n must be at least 10, got {n}")
    if not 1 <= r < p:
        raise ModelError(f"need 1 <= r < p, got r={r}, p={p}")
    if not 0.0 <= missing_frac < 0.5:
        raise ModelError(f"missing_frac must lie in [0, 0.5), got {missing_frac}")
    if not abs(a_coef) < 1:
        raise ModelError("a_coef must be below 1 in absolute value")

    rng = make_rng(seed)
    if loadings is None:
        Lambda = rng.standard_normal((p, r))
    else:
        Lambda = np.asarray(loadings, dtype=float)
        if Lambda.shape != (p, r):
            raise ModelError(f"loadings must have shape {(p, r)}")

    A = a_coef * np.eye(r)
    Sigma_u = (1.0 - a_coef**2) * np.eye(r)
    P0 = solve_lyapunov(A, Sigma_u)
    chol_u = np.linalg.cholesky(Sigma_u)

    ar1 = None
    if phi is not None:
        phi = np.broadcast_to(np.asarray(phi, dtype=float), (p,)).copy()
        ar1 = Ar1Params(phi=phi, sigma_e=1.0 - phi**2)
        e_scale = np.sqrt(ar1.sigma_e)
    else:
        e_scale = np.ones(p)

    factors = np.empty((n, r))
    X = np.empty((n, p))
    f = np.linalg.cholesky(P0) @ rng.standard_normal(r)
    e = rng.standard_normal(p) if ar1 is not None else np.zeros(p)
    for t in range(n):
        f = A @ f + chol_u @ rng.standard_normal(r)
        shock = e_scale * rng.standard_normal(p)
        e = ar1.phi * e + shock if ar1 is not None else shock
        factors[t] = f
        X[t] = Lambda @ f + e

    n_missing = int(round(missing_frac * n * p))
    if n_missing:
        cells = rng.choice(n * p, size=n_missing, replace=False)
        X.reshape(-1)[cells] = np.nan

    params = DfmParams(
        Lambda=Lambda,
        A=A,
        Sigma_u=Sigma_u,
        sigma_eps=np.ones(p),
        alpha0=np.zeros(r),
        P0=P0,
    )
    logger.debug("Simulated n=%d p=%d r=%d seed=%d", n, p, r, seed)
    return SimulatedPanel(TimePanel.from_array(X), params, factors, ar1)

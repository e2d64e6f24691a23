"""Shared fixtures for ADMM tests."""

from typing import NamedTuple

import numpy as np
import pytest

from sparsedfm.statespace.moments import SmoothedMoments


class LoadingsProblem(NamedTuple):
    X: np.ndarray
    mask: np.ndarray
    moments: SmoothedMoments
    sigma_eps: np.ndarray


@pytest.fixture
def make_problem():
    """Data and smoothed moments for a loadings update."""

    def _make(n=60, p=6, r=2, seed=0, missing=0.0):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((n, r))
        B = rng.standard_normal((n, r, r))
        P = 0.05 * B @ np.swapaxes(B, 1, 2)
        Lambda = rng.standard_normal((p, r))
        Lambda[p // 2 :, 1] = 0.0
        X = a @ Lambda.T + 0.3 * rng.standard_normal((n, p))
        mask = rng.random((n, p)) >= missing
        moments = SmoothedMoments(
            S_t=np.einsum("ti,tj->tij", a, a) + P,
            S_lag=np.zeros((n, r, r)),
            a=a,
            a0=np.zeros(r),
            S_0=np.eye(r),
        )
        sigma_eps = rng.uniform(0.5, 1.5, p)
        return LoadingsProblem(np.where(mask, X, np.nan), mask, moments, sigma_eps)

    return _make

"""Shared fixtures for estimator tests."""

import numpy as np
import pytest

from sparsedfm.estimators.em import em_fit
from sparsedfm.statespace.moments import SmoothedMoments
from sparsedfm.statespace.simulate import simulate_dfm


@pytest.fixture(scope="module")
def em_iid():
    """Dense IID EM on the complete 100×20 two-factor panel."""
    sim = simulate_dfm(n=100, p=20, r=2, seed=1)
    return sim, em_fit(sim.panel, 2)


@pytest.fixture
def exact_moments():
    """Moments of a known state path with zero smoothing variance."""

    def _make(a, a0):
        a = np.atleast_2d(np.asarray(a, dtype=float))
        if a.shape[0] == 1 and a.shape[1] > 1:
            a = a.T
        a0 = np.atleast_1d(np.asarray(a0, dtype=float))
        a_prev = np.vstack([a0[None], a[:-1]])
        return SmoothedMoments(
            S_t=np.einsum("ti,tj->tij", a, a),
            S_lag=np.einsum("ti,tj->tij", a, a_prev),
            a=a,
            a0=a0,
            S_0=np.outer(a0, a0),
        )

    return _make

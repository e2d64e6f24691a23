"""Shared fixtures for model API tests."""

import pytest

from sparsedfm.config.options import FitConfig
from sparsedfm.model.api import sparse_dfm_fit
from sparsedfm.statespace.simulate import simulate_dfm


@pytest.fixture(scope="module")
def one_factor_fit():
    """Two-stage fit with a single factor."""
    sim = simulate_dfm(n=80, p=8, r=1, seed=5, missing_frac=0.05)
    return sparse_dfm_fit(sim.panel, FitConfig(r=1, alg="2Stage"))


@pytest.fixture(scope="module")
def sparse_fit():
    """EM-sparse on a short grid with every fit kept."""
    sim = simulate_dfm(n=60, p=10, r=2, seed=8)
    config = FitConfig(
        r=2, alphas=(0.01, 0.1), max_iter=10, store_all_alphas=True
    )
    return sparse_dfm_fit(sim.panel, config)

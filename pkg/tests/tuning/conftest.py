"""Shared fixtures for tuning tests."""

import pytest

from sparsedfm.statespace.simulate import block_sparse_loadings, make_rng, simulate_dfm


@pytest.fixture(scope="module")
def sparse_sim():
    """60×12 panel whose series each load on a single factor."""
    L = block_sparse_loadings(12, 2, make_rng(10))
    return simulate_dfm(n=60, p=12, r=2, seed=3, loadings=L)


@pytest.fixture
def grid_kwargs():
    """Short EM runs keep the grid tests quick."""
    return {"max_iter": 15, "threshold": 1e-4}

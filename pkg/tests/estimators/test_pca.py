"""Tests for principal components and EM starting values."""

import numpy as np
import pytest

from sparsedfm.errors import ModelError
from sparsedfm.estimators.pca import fit_var1, init_params, pca_estimate
from sparsedfm.statespace.params import solve_lyapunov
from sparsedfm.statespace.simulate import simulate_dfm


@pytest.mark.unit
class TestPcaEstimate:
    """Loadings and factors under ΛᵀΛ/p = I."""

    def test_exact_rank_one(self):
        """A noiseless rank-one panel is reconstructed exactly."""
        rng = np.random.default_rng(0)
        X = np.outer(rng.standard_normal(20), rng.standard_normal(5))
        Lambda, F = pca_estimate(X, 1)
        np.testing.assert_allclose(F @ Lambda.T, X, atol=1e-10)

    def test_normalization(self, sim):
        """ΛᵀΛ/p is the identity."""
        Lambda, _ = pca_estimate(sim.panel.values, 2)
        np.testing.assert_allclose(Lambda.T @ Lambda / 20, np.eye(2), atol=1e-10)

    def test_sign_convention(self, sim):
        """The largest-magnitude entry of each column is positive."""
        Lambda, _ = pca_estimate(sim.panel.values, 2)
        idx = np.argmax(np.abs(Lambda), axis=0)
        assert (Lambda[idx, [0, 1]] > 0).all()

    def test_factor_formula(self, sim):
        """F_t = Λᵀx_t / p."""
        X = sim.panel.values
        Lambda, F = pca_estimate(X, 2)
        np.testing.assert_allclose(F, X @ Lambda / 20)

    def test_recovers_loading_space(self):
        """The estimated loading space is within 15 degrees of the truth."""
        sim = simulate_dfm(n=500, p=50, r=2, seed=0)
        Lambda, _ = pca_estimate(sim.panel.values, 2)
        q_hat, _ = np.linalg.qr(Lambda)
        q_true, _ = np.linalg.qr(sim.params.Lambda)
        cosines = np.linalg.svd(q_hat.T @ q_true, compute_uv=False)
        angle = np.degrees(np.arccos(np.clip(cosines.min(), -1.0, 1.0)))
        assert angle < 15.0

    def test_requires_complete_data(self, sim_missing):
        """Gaps must be filled first."""
        with pytest.raises(ModelError, match="complete"):
            pca_estimate(sim_missing.panel.values, 2)

    @pytest.mark.parametrize("r", [0, 20])
    def test_r_out_of_range(self, sim, r):
        """1 <= r < min(n, p)."""
        with pytest.raises(ModelError):
            pca_estimate(sim.panel.values, r)


@pytest.mark.unit
class TestStartingValues:
    """VAR(1) and the initial state distribution."""

    def test_var1_noiseless(self):
        """F_t = 0.5 F_{t−1} gives A = 0.5 exactly."""
        F = 0.5 ** np.arange(12.0)[:, None]
        A, _ = fit_var1(F)
        np.testing.assert_allclose(A, [[0.5]], atol=1e-12)

    def test_init_params(self, sim_missing):
        """α₀ = 0, stationary A and P₀ from the Lyapunov equation."""
        params = init_params(sim_missing.panel, 2)
        np.testing.assert_array_equal(params.alpha0, 0.0)
        assert params.is_stationary()
        np.testing.assert_allclose(params.P0, solve_lyapunov(params.A, params.Sigma_u))
        assert (params.sigma_eps > 0).all()
        assert np.linalg.eigvalsh(params.Sigma_u).min() >= 1e-10

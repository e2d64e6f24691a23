"""Tests for model parameters and the AR(1) augmentation."""

import numpy as np
import pytest

from sparsedfm.errors import ModelError, NumericalError
from sparsedfm.statespace.params import (
    Ar1Params,
    DfmParams,
    build_ar1_augmented,
    shrink_to_stationary,
    solve_lyapunov,
    spectral_norm,
)


@pytest.mark.unit
class TestSolveLyapunov:
    """Stationary covariance of a VAR(1)."""

    def test_scalar(self):
        """0.36 / (1 − 0.64) = 1."""
        P = solve_lyapunov(np.array([[0.8]]), np.array([[0.36]]))
        np.testing.assert_allclose(P, [[1.0]])

    def test_fixed_point(self, params):
        """P = APAᵀ + Q holds for a non-diagonal A."""
        P = solve_lyapunov(params.A, params.Sigma_u)
        np.testing.assert_allclose(P, params.A @ P @ params.A.T + params.Sigma_u)
        np.testing.assert_array_equal(P, P.T)

    def test_unit_root(self):
        """I − A⊗A is singular when A has a unit root."""
        with pytest.raises(NumericalError):
            solve_lyapunov(np.eye(2), np.eye(2))


@pytest.mark.unit
class TestShrinkToStationary:
    """Spectral-norm rescaling of the transition matrix."""

    def test_explosive_is_rescaled(self):
        """Norm >= 1 comes back at 0.99."""
        A = np.array([[1.2, 0.3], [0.0, 0.4]])
        assert spectral_norm(shrink_to_stationary(A)) == pytest.approx(0.99)

    def test_stationary_is_kept(self, params):
        """Norm < 1 is returned unchanged."""
        assert shrink_to_stationary(params.A) is params.A


@pytest.mark.unit
class TestDfmParams:
    """Shape and value validation."""

    def test_dimensions(self, params):
        """p and r come from the loadings."""
        assert (params.p, params.r) == (3, 2)
        assert params.is_stationary()

    def test_wrong_shape(self, params):
        """Mismatched blocks raise ModelError."""
        with pytest.raises(ModelError, match="A must have shape"):
            params.replace(A=np.eye(3))

    def test_nonpositive_variance(self, params):
        """Idiosyncratic variances must be positive."""
        with pytest.raises(ModelError):
            params.replace(sigma_eps=[1.0, 0.0, 1.0])

    def test_non_finite(self, params):
        """NaN parameters are a numerical failure."""
        with pytest.raises(NumericalError):
            params.replace(Sigma_u=[[np.nan, 0.0], [0.0, 1.0]])


@pytest.mark.unit
class TestAr1:
    """Idiosyncratic AR(1) block."""

    def test_stationary_variance(self):
        """σ_e / (1 − φ²)."""
        ar1 = Ar1Params(phi=[0.5, 0.0], sigma_e=[0.75, 2.0])
        np.testing.assert_allclose(ar1.stationary_variance, [1.0, 2.0])

    @pytest.mark.parametrize("phi", [1.0, -1.2])
    def test_rejects_unit_root(self, phi):
        """|φ| must be below one."""
        with pytest.raises(ModelError):
            Ar1Params(phi=[phi], sigma_e=[1.0])

    def test_augmented_layout(self, params):
        """Factors first, then one state per series."""
        ar1 = Ar1Params(phi=[0.5, 0.2, -0.3], sigma_e=[1.0, 1.0, 1.0])
        system = build_ar1_augmented(params, ar1)
        assert system.m == 5
        np.testing.assert_array_equal(system.Lambda_aug[:, :2], params.Lambda)
        np.testing.assert_array_equal(system.Lambda_aug[:, 2:], np.eye(3))
        np.testing.assert_array_equal(system.A_aug[2:, 2:], np.diag(ar1.phi))
        np.testing.assert_array_equal(system.A_aug[:2, 2:], 0.0)
        np.testing.assert_array_equal(system.sigma_meas, ar1.kappa)
        np.testing.assert_allclose(
            np.diag(system.P0_aug)[2:], ar1.stationary_variance
        )

    def test_augmented_size_mismatch(self, params):
        """The AR(1) block must cover every series."""
        with pytest.raises(ModelError):
            build_ar1_augmented(params, Ar1Params(phi=[0.1], sigma_e=[1.0]))

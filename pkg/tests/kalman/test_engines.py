"""Tests for the univariate and multivariate filter/smoother engines."""

from dataclasses import replace

import numpy as np
import pytest

from sparsedfm.errors import ModelError
from sparsedfm.kalman import (
    kalman_multivariate,
    kalman_univariate,
    run_kfs,
    woodbury_inverse,
    woodbury_logdet,
)

ENGINES = [kalman_univariate, kalman_multivariate]


@pytest.mark.unit
class TestAgainstJointGaussian:
    """Both engines reproduce exact Gaussian conditioning."""

    @pytest.mark.parametrize("engine", ENGINES)
    def test_loglik_small(self, engine, make_input, gaussian_oracle):
        """n=6, p=3, r=1 likelihood matches the brute-force density."""
        inp = make_input(n=6, p=3, m=1, seed=4, missing=0.2)
        expected, *_ = gaussian_oracle(inp)
        assert engine(inp).loglik == pytest.approx(expected, rel=1e-9)

    @pytest.mark.parametrize("engine", ENGINES)
    def test_smoothed_moments(self, engine, make_input, gaussian_oracle):
        """n=8, p=4, r=2 smoothed means, covariances and lag covariances."""
        inp = make_input(n=8, p=4, m=2, seed=11, missing=0.25, empty_row=3)
        loglik, a, P, P_lag = gaussian_oracle(inp)
        out = engine(inp)
        assert out.loglik == pytest.approx(loglik, rel=1e-9)
        np.testing.assert_allclose(out.a0_smooth, a[0], atol=1e-8)
        np.testing.assert_allclose(out.P0_smooth, P[0], atol=1e-8)
        np.testing.assert_allclose(out.a_smooth, a[1:], atol=1e-8)
        np.testing.assert_allclose(out.P_smooth, P[1:], atol=1e-8)
        np.testing.assert_allclose(out.P_lag_smooth, P_lag, atol=1e-8)


@pytest.mark.unit
class TestEngineEquivalence:
    """The engines agree with each other on larger inputs."""

    @pytest.mark.parametrize("missing", [0.0, 0.3])
    def test_same_output(self, make_input, missing):
        """Every moment and the likelihood agree."""
        inp = make_input(n=40, p=12, m=3, seed=2, missing=missing, empty_row=10)
        uni = kalman_univariate(inp)
        multi = kalman_multivariate(inp)
        assert uni.loglik == pytest.approx(multi.loglik, rel=1e-9)
        for name in ("a_filt", "P_filt", "a_smooth", "P_smooth", "P_lag_smooth"):
            np.testing.assert_allclose(
                getattr(uni, name), getattr(multi, name), atol=1e-8, err_msg=name
            )

    @pytest.mark.parametrize("engine", ENGINES)
    def test_empty_row_skips_update(self, engine, make_input):
        """With nothing observed the filtered state is the prediction."""
        inp = make_input(n=10, p=4, m=2, seed=5, empty_row=6)
        out = engine(inp)
        np.testing.assert_allclose(out.a_filt[6], out.a_pred[6])
        np.testing.assert_allclose(out.P_filt[6], out.P_pred[6])

    @pytest.mark.parametrize("engine", ENGINES)
    def test_covariances_symmetric(self, engine, make_input):
        """Smoothed covariances are symmetric."""
        out = engine(make_input(seed=9, missing=0.1))
        np.testing.assert_allclose(out.P_smooth, np.swapaxes(out.P_smooth, 1, 2))

    @pytest.mark.parametrize("engine", ENGINES)
    def test_missing_values_never_read(self, engine, make_input):
        """Changing a missing cell's stored value changes nothing."""
        inp = make_input(n=12, p=4, m=2, seed=6, missing=0.3)
        other = replace(inp, X=np.where(inp.mask, inp.X, 1e6))
        assert engine(other).loglik == pytest.approx(engine(inp).loglik, rel=1e-12)


@pytest.mark.unit
class TestWoodbury:
    """Matrix identities used by the multivariate engine."""

    def test_inverse_and_logdet(self):
        """Both match the direct computation."""
        rng = np.random.default_rng(0)
        L = rng.standard_normal((7, 2))
        B = rng.standard_normal((2, 2))
        P = B @ B.T + np.eye(2)
        s = rng.uniform(0.5, 2.0, 7)
        C = L @ P @ L.T + np.diag(s)
        np.testing.assert_allclose(woodbury_inverse(L, P, s), np.linalg.inv(C))
        assert woodbury_logdet(L, P, s) == pytest.approx(np.linalg.slogdet(C)[1])


@pytest.mark.unit
class TestKfsInput:
    """Input validation."""

    def test_shape_mismatch(self, make_input):
        """A loadings matrix of the wrong width is rejected."""
        inp = make_input(n=5, p=3, m=2)
        with pytest.raises(ModelError, match="Lambda"):
            replace(inp, Lambda=np.ones((3, 3)))

    def test_nonpositive_noise(self, make_input):
        """Measurement variances must be positive."""
        inp = make_input(n=5, p=3, m=2)
        with pytest.raises(ModelError):
            replace(inp, sigma_eps=np.zeros(3))

    def test_run_kfs_default_engine(self, make_input):
        """The default engine is univariate."""
        assert run_kfs(make_input(n=5, p=3, m=1)).engine == "univariate"


@pytest.mark.slow
@pytest.mark.parametrize("p", [10, 50])
@pytest.mark.parametrize("missing", [0.0, 0.1])
@pytest.mark.parametrize("seed", range(5))
def test_engines_agree_over_seeds(make_input, p, missing, seed):
    """n=100, r=2 panels across dimensions, gaps and seeds."""
    inp = make_input(n=100, p=p, m=2, seed=seed, missing=missing)
    uni = kalman_univariate(inp)
    multi = kalman_multivariate(inp)
    assert uni.loglik == pytest.approx(multi.loglik, rel=1e-8)
    for name in ("a_smooth", "P_smooth", "P_lag_smooth"):
        np.testing.assert_allclose(
            getattr(uni, name), getattr(multi, name), rtol=1e-8, atol=1e-10
        )


def _median_smooth_time(sim, engine, ar1=None, repeats=10):
    import time

    from sparsedfm.estimators.em import smooth_with_params

    smooth_with_params(sim.panel, sim.params, ar1, engine=engine)
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        smooth_with_params(sim.panel, sim.params, ar1, engine=engine)
        times.append(time.perf_counter() - start)
    return np.median(times)


@pytest.mark.slow
def test_univariate_faster_for_iid_errors():
    """With IID errors and p >> r the sequential engine wins on wall time."""
    from sparsedfm.statespace.simulate import simulate_dfm

    sim = simulate_dfm(n=100, p=200, r=2, seed=0)
    assert _median_smooth_time(sim, "univariate") < _median_smooth_time(
        sim, "multivariate"
    )


@pytest.mark.slow
def test_multivariate_faster_for_ar1_errors():
    """With AR1 errors the state holds p + r entries and the ordering flips."""
    from sparsedfm.statespace.simulate import simulate_dfm

    sim = simulate_dfm(n=100, p=200, r=2, seed=0, phi=0.5)
    assert _median_smooth_time(sim, "multivariate", sim.ar1) < _median_smooth_time(
        sim, "univariate", sim.ar1
    )

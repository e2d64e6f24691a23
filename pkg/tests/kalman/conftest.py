"""Shared fixtures for Kalman engine tests."""

import numpy as np
import pytest
from scipy.stats import multivariate_normal

from sparsedfm.kalman.base import KfsInput
from sparsedfm.statespace.params import solve_lyapunov


@pytest.fixture
def make_input():
    """Random stable system and data, with optional missing cells."""

    def _make(n=30, p=6, m=2, seed=0, missing=0.0, empty_row=None):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((m, m))
        A *= 0.7 / np.linalg.norm(A, 2)
        B = rng.standard_normal((m, m))
        Q = B @ B.T + 0.1 * np.eye(m)
        X = rng.standard_normal((n, p))
        mask = rng.random((n, p)) >= missing
        if empty_row is not None:
            mask[empty_row] = False
        return KfsInput(
            X=np.where(mask, X, np.nan),
            mask=mask,
            Lambda=rng.standard_normal((p, m)),
            A=A,
            Sigma_u=Q,
            sigma_eps=rng.uniform(0.5, 1.5, p),
            alpha0=rng.standard_normal(m),
            P0=solve_lyapunov(A, Q),
        )

    return _make


@pytest.fixture
def gaussian_oracle():
    """Exact moments from the joint Gaussian of all states and observed cells.

    Returns loglik, smoothed means/covariances for t = 0..n and the
    lag-one covariances Cov(F_t, F_{t-1} | data) for t = 1..n.
    """

    def _oracle(inp: KfsInput):
        n, p, m = inp.n, inp.p, inp.m
        A, Q, L = inp.A, inp.Sigma_u, inp.Lambda

        means = [inp.alpha0]
        V = [inp.P0]
        for _ in range(n):
            means.append(A @ means[-1])
            V.append(A @ V[-1] @ A.T + Q)
        mu_F = np.concatenate(means)

        S_F = np.zeros(((n + 1) * m, (n + 1) * m))
        for s in range(n + 1):
            power = np.eye(m)
            for t in range(s, n + 1):
                block = power @ V[s]
                S_F[t * m : (t + 1) * m, s * m : (s + 1) * m] = block
                S_F[s * m : (s + 1) * m, t * m : (t + 1) * m] = block.T
                power = A @ power

        # X_t = L F_t + eps_t for t = 1..n
        H = np.zeros((n * p, (n + 1) * m))
        for t in range(n):
            H[t * p : (t + 1) * p, (t + 1) * m : (t + 2) * m] = L
        keep = inp.mask.reshape(-1)
        H = H[keep]
        x = inp.X.reshape(-1)[keep]
        noise = np.tile(inp.sigma_eps, n)[keep]

        mu_x = H @ mu_F
        S_x = H @ S_F @ H.T + np.diag(noise)
        S_Fx = S_F @ H.T
        loglik = multivariate_normal(mu_x, S_x).logpdf(x)

        gain = np.linalg.solve(S_x, S_Fx.T).T
        mean = mu_F + gain @ (x - mu_x)
        cov = S_F - gain @ S_Fx.T

        a = mean.reshape(n + 1, m)
        P = np.stack(
            [cov[t * m : (t + 1) * m, t * m : (t + 1) * m] for t in range(n + 1)]
        )
        P_lag = np.stack(
            [
                cov[t * m : (t + 1) * m, (t - 1) * m : t * m]
                for t in range(1, n + 1)
            ]
        )
        return float(loglik), a, P, P_lag

    return _oracle

# src/sparsedfm/kalman/multivariate.py
"""Classic multivariate Kalman filter with the fixed-interval smoother."""

import logging

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ..errors import NumericalError
from .base import (
    KfsInput,
    KfsOutput,
    check_loglik,
    kalman_engine,
    smoother_gains,
    symmetrize,
)

logger = logging.getLogger(__name__)

LOG_2PI = np.log(2.0 * np.pi)


def woodbury_inverse(Lambda: np.ndarray, P: np.ndarray, sigma: np.ndarray):
    """(ΛPΛᵀ + diag σ)⁻¹ = Σ⁻¹ − Σ⁻¹Λ(P⁻¹ + ΛᵀΣ⁻¹Λ)⁻¹ΛᵀΣ⁻¹."""
    s_inv = 1.0 / sigma
    LS = Lambda * s_inv[:, None]
    M = np.linalg.inv(P) + Lambda.T @ LS
    return np.diag(s_inv) - LS @ np.linalg.solve(M, LS.T)


def woodbury_logdet(Lambda: np.ndarray, P: np.ndarray, sigma: np.ndarray) -> float:
    """log|ΛPΛᵀ + diag σ| = log|Σ| + log|P| + log|P⁻¹ + ΛᵀΣ⁻¹Λ|."""
    M = np.linalg.inv(P) + Lambda.T @ (Lambda / sigma[:, None])
    _, logdet_P = np.linalg.slogdet(P)
    _, logdet_M = np.linalg.slogdet(M)
    return float(np.log(sigma).sum() + logdet_P + logdet_M)


def _direct_inverse(Lambda: np.ndarray, P: np.ndarray, sigma: np.ndarray):
    C = symmetrize(Lambda @ P @ Lambda.T + np.diag(sigma))
    factor = cho_factor(C, lower=True)
    C_inv = cho_solve(factor, np.eye(len(sigma)))
    logdet = 2.0 * np.log(np.diag(factor[0])).sum()
    return C_inv, float(logdet)


@kalman_engine("multivariate", "Joint update of all observed series at each t")
def kalman_multivariate(inp: KfsInput) -> KfsOutput:
    """Filter with missing rows deleted, then smooth backwards.

    C_t⁻¹ goes through the Woodbury identity whenever the state is smaller
    than the number of series observed at t.
    """
    n, m = inp.n, inp.m
    A, Q = inp.A, inp.Sigma_u
    a_pred = np.empty((n, m))
    P_pred = np.empty((n, m, m))
    a_filt = np.empty((n, m))
    P_filt = np.empty((n, m, m))
    KL_last = np.zeros((m, m))

    a, P = inp.alpha0, inp.P0
    loglik = 0.0
    for t in range(n):
        a_p = A @ a
        P_p = symmetrize(A @ P @ A.T + Q)
        a_pred[t], P_pred[t] = a_p, P_p

        observed = inp.mask[t]
        p_t = int(observed.sum())
        if p_t == 0:
            a, P = a_p, P_p
            KL = np.zeros((m, m))
        else:
            L = inp.Lambda[observed]
            s = inp.sigma_eps[observed]
            v = inp.X[t, observed] - L @ a_p
            try:
                if m < p_t:
                    C_inv = woodbury_inverse(L, P_p, s)
                    logdet = woodbury_logdet(L, P_p, s)
                else:
                    C_inv, logdet = _direct_inverse(L, P_p, s)
            except (LinAlgError, np.linalg.LinAlgError) as e:
                raise NumericalError(
                    f"innovation covariance singular at t={t + 1}: {e}"
                )
            PLt = P_p @ L.T
            K = PLt @ C_inv
            a = a_p + K @ v
            P = symmetrize(P_p - K @ PLt.T)
            loglik -= 0.5 * (p_t * LOG_2PI + logdet + v @ C_inv @ v)
            if not np.isfinite(loglik) or not np.isfinite(a).all():
                raise NumericalError(f"non-finite filter state at t={t + 1}")
            KL = K @ L
        a_filt[t], P_filt[t] = a, P
        if t == n - 1:
            KL_last = KL

    J = smoother_gains(A, inp.P0, P_pred, P_filt)

    a_smooth = np.empty((n, m))
    P_smooth = np.empty((n, m, m))
    a_smooth[-1], P_smooth[-1] = a_filt[-1], P_filt[-1]
    for k in range(n - 2, -1, -1):
        Jk = J[k + 1]
        a_smooth[k] = a_filt[k] + Jk @ (a_smooth[k + 1] - a_pred[k + 1])
        P_smooth[k] = symmetrize(
            P_filt[k] + Jk @ (P_smooth[k + 1] - P_pred[k + 1]) @ Jk.T
        )
    a0_smooth = inp.alpha0 + J[0] @ (a_smooth[0] - a_pred[0])
    P0_smooth = symmetrize(inp.P0 + J[0] @ (P_smooth[0] - P_pred[0]) @ J[0].T)

    # Lag-one covariances, backwards from P_{n,n−1|n} = (I − K_nΛ)AP_{n−1|n−1}
    P_prev = np.concatenate([inp.P0[None], P_filt[:-1]], axis=0)
    P_lag = np.empty((n, m, m))
    P_lag[-1] = (np.eye(m) - KL_last) @ A @ P_prev[-1]
    for k in range(n - 1, 0, -1):
        P_lag[k - 1] = (
            P_filt[k - 1] @ J[k - 1].T
            + J[k] @ (P_lag[k] - A @ P_filt[k - 1]) @ J[k - 1].T
        )

    return KfsOutput(
        a_pred=a_pred,
        P_pred=P_pred,
        a_filt=a_filt,
        P_filt=P_filt,
        a_smooth=a_smooth,
        P_smooth=P_smooth,
        P_lag_smooth=P_lag,
        a0_smooth=a0_smooth,
        P0_smooth=P0_smooth,
        loglik=check_loglik(loglik),
        engine="multivariate",
    )

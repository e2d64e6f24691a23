# src/sparsedfm/kalman/univariate.py
"""Sequential (one series at a time) Kalman filter and smoother.

With a diagonal measurement covariance every update is a scalar division,
so the inner loops are compiled with numba.
"""

import logging

import numpy as np
from numba import njit

from .base import (
    KfsInput,
    KfsOutput,
    check_loglik,
    kalman_engine,
    smoother_gains,
    symmetrize,
)

logger = logging.getLogger(__name__)


@njit(cache=True)
def _sequential_filter(X, mask, Lam, A, Q, sig, a0, P0):
    n, p = X.shape
    m = A.shape[0]
    a_pred = np.empty((n, m))
    P_pred = np.empty((n, m, m))
    a_filt = np.empty((n, m))
    P_filt = np.empty((n, m, m))
    v = np.zeros((n, p))
    C = np.zeros((n, p))
    K = np.zeros((n, p, m))
    used = np.zeros((n, p), dtype=np.bool_)
    Pz = np.empty(m)
    log_2pi = np.log(2.0 * np.pi)

    a = a0.copy()
    P = P0.copy()
    loglik = 0.0
    for t in range(n):
        a = A @ a
        P = A @ P @ A.T + Q
        P = 0.5 * (P + P.T)
        a_pred[t] = a
        P_pred[t] = P

        for i in range(p):
            if not mask[t, i]:
                continue
            c = sig[i]
            za = 0.0
            for j in range(m):
                s = 0.0
                for k in range(m):
                    s += P[j, k] * Lam[i, k]
                Pz[j] = s
                c += Lam[i, j] * s
                za += Lam[i, j] * a[j]
            # Round-off can push C to zero or below; skip like a missing cell
            if c <= 0.0:
                continue
            vi = X[t, i] - za
            for j in range(m):
                kj = Pz[j] / c
                K[t, i, j] = kj
                a[j] += kj * vi
            for j in range(m):
                for k in range(m):
                    P[j, k] -= K[t, i, j] * Pz[k]
            v[t, i] = vi
            C[t, i] = c
            used[t, i] = True
            loglik -= 0.5 * (log_2pi + np.log(c) + vi * vi / c)

        P = 0.5 * (P + P.T)
        a_filt[t] = a
        P_filt[t] = P
    return a_pred, P_pred, a_filt, P_filt, v, C, K, used, loglik


@njit(cache=True)
def _sequential_smoother(Lam, A, a0, P0, a_pred, P_pred, v, C, K, used):
    n, m = a_pred.shape
    p = Lam.shape[0]
    a_smooth = np.empty((n, m))
    P_smooth = np.empty((n, m, m))
    r = np.zeros(m)
    N = np.zeros((m, m))
    Nk = np.empty(m)

    for t in range(n - 1, -1, -1):
        for i in range(p - 1, -1, -1):
            if not used[t, i]:
                continue
            c = C[t, i]
            # r ← zv/C + Lᵀr and N ← zzᵀ/C + LᵀNL with L = I − kzᵀ
            kr = 0.0
            kNk = 0.0
            for j in range(m):
                kr += K[t, i, j] * r[j]
                s = 0.0
                for k in range(m):
                    s += N[j, k] * K[t, i, k]
                Nk[j] = s
            for j in range(m):
                kNk += K[t, i, j] * Nk[j]
            coef = v[t, i] / c - kr
            for j in range(m):
                r[j] += Lam[i, j] * coef
            w = 1.0 / c + kNk
            for j in range(m):
                zj = Lam[i, j]
                for k in range(m):
                    zk = Lam[i, k]
                    N[j, k] += zj * zk * w - Nk[j] * zk - zj * Nk[k]

        Pt = P_pred[t]
        a_smooth[t] = a_pred[t] + Pt @ r
        Ps = Pt - Pt @ N @ Pt
        P_smooth[t] = 0.5 * (Ps + Ps.T)
        r = A.T @ r
        N = A.T @ N @ A
        N = 0.5 * (N + N.T)

    a0_smooth = a0 + P0 @ r
    P0s = P0 - P0 @ N @ P0
    return a_smooth, P_smooth, a0_smooth, 0.5 * (P0s + P0s.T)


@kalman_engine("univariate", "Sequential scalar updates, one series at a time")
def kalman_univariate(inp: KfsInput) -> KfsOutput:
    """Sequential filter, backward r/N smoother and de Jong lag covariances."""
    a_pred, P_pred, a_filt, P_filt, v, C, K, used, loglik = _sequential_filter(
        inp.X,
        inp.mask,
        inp.Lambda,
        inp.A,
        inp.Sigma_u,
        inp.sigma_eps,
        inp.alpha0,
        inp.P0,
    )
    a_smooth, P_smooth, a0_smooth, P0_smooth = _sequential_smoother(
        inp.Lambda, inp.A, inp.alpha0, inp.P0, a_pred, P_pred, v, C, K, used
    )

    # P_{t,t−1|n} = P_{t|n} P_{t|t−1}⁻¹ A P_{t−1|t−1} = P_{t|n} J_{t−1}ᵀ
    J = smoother_gains(inp.A, inp.P0, P_pred, P_filt)
    P_lag = P_smooth @ np.swapaxes(J, 1, 2)

    return KfsOutput(
        a_pred=a_pred,
        P_pred=P_pred,
        a_filt=a_filt,
        P_filt=P_filt,
        a_smooth=a_smooth,
        P_smooth=symmetrize(P_smooth),
        P_lag_smooth=P_lag,
        a0_smooth=a0_smooth,
        P0_smooth=P0_smooth,
        loglik=check_loglik(loglik),
        engine="univariate",
    )

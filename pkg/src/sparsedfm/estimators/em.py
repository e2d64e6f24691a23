# src/sparsedfm/estimators/em.py
"""PCA, two-stage and EM estimation of the dynamic factor model."""

import logging
from dataclasses import replace
from typing import Optional, Tuple, Union

import numpy as np

from ..config.options import Alg, ErrorModel, FitConfig, KalmanEngine
from ..data.panel import TimePanel
from ..errors import ModelError, NumericalError
from ..kalman.base import KfsInput, KfsOutput
from ..kalman.registry import run_kfs
from ..sparse.admm import AdmmState, admm_solve, penalty
from ..statespace.moments import SmoothedMoments
from ..statespace.params import (
    Ar1Params,
    AugmentedSystem,
    DfmParams,
    build_ar1_augmented,
    shrink_to_stationary,
)
from .mstep import (
    floor_eigenvalues,
    m_step_ar1,
    m_step_lambda_dense,
    m_step_sigma_eps,
    m_step_transition,
)
from .pca import init_ar1, pca_start
from .result import EmLog, EmState, FitResult, build_result, prepare_panel

logger = logging.getLogger(__name__)

EngineLike = Union[str, KalmanEngine]


def em_converged(
    loglik_j: float, loglik_jm1: float, threshold: float
) -> Tuple[float, bool]:
    """Relative change M_j = (ℓ_j − ℓ_{j−1}) / ((ℓ_j + ℓ_{j−1})/2).

    Converged when |M_j| < threshold; a zero denominator counts as converged.
    """
    if not (np.isfinite(loglik_j) and np.isfinite(loglik_jm1)):
        raise NumericalError("log-likelihood is not finite")
    denom = (loglik_j + loglik_jm1) / 2.0
    if denom == 0.0:
        return 0.0, True
    m_j = (loglik_j - loglik_jm1) / denom
    return float(m_j), bool(abs(m_j) < threshold)


def _warn_slow_pairing(err: ErrorModel, engine: EngineLike):
    if err is ErrorModel.AR1 and KalmanEngine(engine) is KalmanEngine.UNIVARIATE:
        logger.warning(
            "AR1 errors with the univariate engine are slow; "
            "the multivariate engine is usually faster here"
        )


def _augmented(
    params: DfmParams,
    ar1: Ar1Params,
    alpha0_aug: Optional[np.ndarray] = None,
    P0_aug: Optional[np.ndarray] = None,
) -> AugmentedSystem:
    system = build_ar1_augmented(params, ar1)
    if alpha0_aug is not None:
        system = replace(system, alpha0_aug=alpha0_aug, P0_aug=P0_aug)
    return system


def _e_step(
    scaled: TimePanel,
    params: DfmParams,
    ar1: Optional[Ar1Params],
    engine: EngineLike,
    alpha0_aug: Optional[np.ndarray] = None,
    P0_aug: Optional[np.ndarray] = None,
) -> KfsOutput:
    if ar1 is None:
        inp = KfsInput.from_params(scaled.values, scaled.mask, params)
    else:
        system = _augmented(params, ar1, alpha0_aug, P0_aug)
        inp = KfsInput.from_augmented(scaled.values, scaled.mask, system)
    return run_kfs(inp, engine)


def _factor_idio_cross(kfs: KfsOutput, r: int) -> np.ndarray:
    """E[F_t e_{i,t} | all data] as an n×p×r array."""
    a_f = kfs.a_smooth[:, :r]
    a_e = kfs.a_smooth[:, r:]
    cov = np.swapaxes(kfs.P_smooth[:, :r, r:], 1, 2)
    return a_e[:, :, None] * a_f[:, None, :] + cov


def _solve_loadings(
    scaled: TimePanel,
    moments: SmoothedMoments,
    weights: np.ndarray,
    alpha: Optional[float],
    q: int,
    admm: Optional[AdmmState],
    cross: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, Optional[AdmmState]]:
    X, mask = scaled.values, scaled.mask
    if alpha is None:
        return m_step_lambda_dense(X, mask, moments, cross), None
    return admm_solve(
        X, mask, moments, weights, alpha, q=q, warm=admm, cross=cross
    )


def _m_step_iid(
    scaled: TimePanel,
    kfs: KfsOutput,
    params: DfmParams,
    alpha: Optional[float],
    q: int,
    admm: Optional[AdmmState],
) -> Tuple[DfmParams, Optional[AdmmState]]:
    moments = SmoothedMoments.from_kfs(kfs)
    A, Sigma_u = m_step_transition(moments)
    Lambda, admm = _solve_loadings(
        scaled, moments, params.sigma_eps, alpha, q, admm
    )
    sigma_eps = m_step_sigma_eps(
        scaled.values, scaled.mask, moments, Lambda, params.sigma_eps
    )
    new = DfmParams(
        Lambda=Lambda,
        A=shrink_to_stationary(A),
        Sigma_u=Sigma_u,
        sigma_eps=sigma_eps,
        alpha0=kfs.a0_smooth,
        P0=floor_eigenvalues(kfs.P0_smooth, 0.0),
    )
    return new, admm


def _ar1_penalty(alpha: Optional[float], kappa: float) -> Optional[float]:
    return None if alpha is None else alpha * kappa


def _m_step_ar1(
    scaled: TimePanel,
    kfs: KfsOutput,
    params: DfmParams,
    ar1: Ar1Params,
    alpha: Optional[float],
    q: int,
    admm: Optional[AdmmState],
) -> Tuple[DfmParams, Ar1Params, Optional[AdmmState], np.ndarray, np.ndarray]:
    r, p = params.r, params.p
    moments = SmoothedMoments.from_kfs(kfs)
    factor_m = moments.block(np.arange(r))
    idio_m = moments.block(np.arange(r, r + p))

    A, Sigma_u = m_step_transition(factor_m)
    cross = _factor_idio_cross(kfs, r)
    # Loadings regress X_t − e_t on F_t under measurement variance κ.
    # Scaling the objective by κ leaves unit row weights and a penalty ακ.
    Lambda, admm = _solve_loadings(
        scaled,
        factor_m,
        np.ones(p),
        _ar1_penalty(alpha, ar1.kappa),
        q,
        admm,
        cross,
    )
    ar1_new = m_step_ar1(idio_m, ar1.kappa)

    P0_aug = floor_eigenvalues(kfs.P0_smooth, 0.0)
    new = DfmParams(
        Lambda=Lambda,
        A=shrink_to_stationary(A),
        Sigma_u=Sigma_u,
        sigma_eps=ar1_new.stationary_variance,
        alpha0=kfs.a0_smooth[:r],
        P0=P0_aug[:r, :r],
    )
    return new, ar1_new, admm, kfs.a0_smooth.copy(), P0_aug


def _fit_config(
    alg: Alg,
    r: int,
    err: ErrorModel,
    engine: EngineLike,
    standardize: bool,
    **changes,
) -> FitConfig:
    return FitConfig(
        r=r, alg=alg, err=err, engine=engine, standardize=standardize, **changes
    )


def pca_fit(panel: TimePanel, r: int, standardize: bool = True) -> FitResult:
    """Static principal-components fit on the filled panel."""
    scaled, scaler = prepare_panel(panel, standardize)
    start = pca_start(scaled, r)
    config = _fit_config(
        Alg.PCA, r, ErrorModel.IID, KalmanEngine.UNIVARIATE, standardize
    )
    logger.info("PCA fit with r=%d on %d x %d panel", r, panel.n, panel.p)
    return build_result(
        config, panel, scaled, scaler, start.params, start.factors
    )


def smooth_with_params(
    panel: TimePanel,
    params: DfmParams,
    ar1: Optional[Ar1Params] = None,
    engine: EngineLike = KalmanEngine.UNIVARIATE,
    standardize: bool = True,
    config: Optional[FitConfig] = None,
) -> FitResult:
    """One filter/smoother pass with parameters held fixed.

    Used by the two-stage estimator and to re-run the smoother on new data
    with stored parameters.
    """
    if params.p != panel.p:
        raise ModelError(f"parameters cover {params.p} series, panel has {panel.p}")
    scaled, scaler = prepare_panel(panel, standardize)
    if ar1 is not None:
        params = params.replace(sigma_eps=ar1.stationary_variance)
    kfs = _e_step(scaled, params, ar1, engine)
    if config is None:
        config = _fit_config(
            Alg.TWO_STAGE,
            params.r,
            ErrorModel.AR1 if ar1 is not None else ErrorModel.IID,
            engine,
            standardize,
        )
    return build_result(
        config,
        panel,
        scaled,
        scaler,
        params,
        kfs.a_smooth,
        kfs.P_smooth,
        ar1=ar1,
        kfs=kfs,
        em_state=EmState(params=params, ar1=ar1),
    )


def two_stage(
    panel: TimePanel,
    r: int,
    engine: EngineLike = KalmanEngine.UNIVARIATE,
    err: ErrorModel = ErrorModel.IID,
    standardize: bool = True,
) -> FitResult:
    """PCA starting values, then a single smoother pass for the factors."""
    err = ErrorModel(err)
    _warn_slow_pairing(err, engine)
    scaled, _ = prepare_panel(panel, standardize)
    start = pca_start(scaled, r)
    ar1 = init_ar1(start) if err is ErrorModel.AR1 else None
    config = _fit_config(Alg.TWO_STAGE, r, err, engine, standardize)
    return smooth_with_params(
        panel, start.params, ar1, engine, standardize, config=config
    )


def em_fit(
    panel: TimePanel,
    r: int,
    err: ErrorModel = ErrorModel.IID,
    engine: EngineLike = KalmanEngine.UNIVARIATE,
    max_iter: int = 100,
    threshold: float = 1e-4,
    alpha: Optional[float] = None,
    q: int = 0,
    warm: Optional[EmState] = None,
    standardize: bool = True,
) -> FitResult:
    """Quasi-maximum likelihood by EM.

    Each iteration runs the smoother (E-step), records the innovations
    log-likelihood and checks convergence before updating the parameters,
    so the returned parameters are the ones behind the final likelihood.

    Args:
        panel: Data in original units
        r: Number of factors
        err: Idiosyncratic error model
        engine: Kalman filter/smoother engine
        max_iter: Maximum number of E-steps
        threshold: Convergence threshold on |M_j|
        alpha: L1 penalty; None gives dense loadings
        q: Leading series exempt from the penalty
        warm: State of a previous run to start from instead of PCA
        standardize: Fit on z-scored columns

    Returns:
        FitResult with the EM log; hitting ``max_iter`` is not an error

    Raises:
        NumericalError: Non-finite log-likelihood, with the iteration index
    """
    err = ErrorModel(err)
    _warn_slow_pairing(err, engine)
    if alpha is not None and alpha < 0:
        raise ModelError(f"alpha must be nonnegative, got {alpha}")
    scaled, scaler = prepare_panel(panel, standardize)

    alpha0_aug = P0_aug = None
    admm: Optional[AdmmState] = None
    if warm is not None and warm.params.r == r and warm.params.p == panel.p:
        params, ar1, admm = warm.params, warm.ar1, warm.admm
        alpha0_aug, P0_aug = warm.alpha0_aug, warm.P0_aug
        if err is ErrorModel.AR1 and ar1 is None:
            ar1 = init_ar1(pca_start(scaled, r))
        elif err is ErrorModel.IID:
            ar1 = alpha0_aug = P0_aug = None
    else:
        start = pca_start(scaled, r)
        params = start.params
        ar1 = init_ar1(start) if err is ErrorModel.AR1 else None
    if ar1 is not None and alpha0_aug is None:
        params = params.replace(sigma_eps=ar1.stationary_variance)

    logliks, m_values, penalized = [], [], []
    admm_total = 0
    converged = False
    kfs = None
    for it in range(1, max_iter + 1):
        try:
            kfs = _e_step(scaled, params, ar1, engine, alpha0_aug, P0_aug)
        except NumericalError as e:
            raise NumericalError(e.message, iteration=it) from e
        loglik = kfs.loglik
        logliks.append(loglik)
        penalized.append(
            loglik - (penalty(params.Lambda, alpha, q) if alpha is not None else 0.0)
        )
        if it == 1:
            m_values.append(float("nan"))
        else:
            m_j, converged = em_converged(loglik, logliks[-2], threshold)
            m_values.append(m_j)
        logger.debug("EM iteration %d: loglik=%.6f M=%s", it, loglik, m_values[-1])
        if converged or it == max_iter:
            break

        if ar1 is None:
            params, admm = _m_step_iid(scaled, kfs, params, alpha, q, admm)
        else:
            params, ar1, admm, alpha0_aug, P0_aug = _m_step_ar1(
                scaled, kfs, params, ar1, alpha, q, admm
            )
        if admm is not None:
            admm_total += admm.iterations

    if converged:
        logger.info("EM converged after %d iterations", len(logliks))
    else:
        logger.warning("EM stopped at max_iter=%d without converging", max_iter)

    em_log = EmLog(
        logliks=tuple(logliks),
        m_values=tuple(m_values),
        penalized=tuple(penalized),
        iterations=len(logliks),
        converged=converged,
        admm_iterations=admm_total,
    )
    alg = Alg.EM if alpha is None else Alg.EM_SPARSE
    changes = {"alphas": (alpha,)} if alpha is not None else {}
    config = _fit_config(
        alg,
        r,
        err,
        engine,
        standardize,
        q=q,
        max_iter=max_iter,
        threshold=threshold,
        **changes,
    )
    return build_result(
        config,
        panel,
        scaled,
        scaler,
        params,
        kfs.a_smooth,
        kfs.P_smooth,
        ar1=ar1,
        kfs=kfs,
        em_log=em_log,
        em_state=EmState(params, ar1, admm, alpha0_aug, P0_aug),
        alpha=alpha,
    )

# src/sparsedfm/model/api.py
"""Fit, fitted values, residuals and forecasts."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
from scipy.linalg import block_diag

from ..config.options import Alg, FitConfig
from ..data.panel import TimePanel
from ..errors import ModelError
from ..estimators.em import em_fit, pca_fit, smooth_with_params, two_stage
from ..estimators.result import FitResult
from ..tuning.alpha import alpha_grid_search

logger = logging.getLogger(__name__)

SCALES = ("standardized", "original")


def _check_config(panel: TimePanel, config: FitConfig) -> int:
    if config.r is None:
        raise ModelError("the number of factors r is required (see tune_factors)")
    r = int(config.r)
    if not 1 <= r < min(panel.n, panel.p):
        raise ModelError(
            f"r must satisfy 1 <= r < min(n, p) = {min(panel.n, panel.p)}, got {r}"
        )
    if config.q > panel.p:
        raise ModelError(f"q must not exceed the number of series ({panel.p})")
    return r


def sparse_dfm_fit(panel: TimePanel, config: FitConfig) -> FitResult:
    """Estimate a dynamic factor model with the algorithm named in ``config``.

    EM-sparse runs the warm-started α grid and returns the fit at the
    BIC-selected α, without a separate refit. Missing cells of the panel
    get fitted values like any other cell.
    """
    r = _check_config(panel, config)
    logger.info(
        "Fitting %s (err=%s, engine=%s) with r=%d on %d x %d panel",
        config.alg.value,
        config.err.value,
        config.engine.value,
        r,
        panel.n,
        panel.p,
    )
    if config.alg is Alg.PCA:
        result = pca_fit(panel, r, config.standardize)
    elif config.alg is Alg.TWO_STAGE:
        result = two_stage(
            panel, r, config.engine, config.err, config.standardize
        )
    elif config.alg is Alg.EM:
        result = em_fit(
            panel,
            r,
            err=config.err,
            engine=config.engine,
            max_iter=config.max_iter,
            threshold=config.threshold,
            q=config.q,
            standardize=config.standardize,
        )
    else:
        path = alpha_grid_search(
            panel,
            r,
            config.alphas,
            q=config.q,
            err=config.err,
            engine=config.engine,
            max_iter=config.max_iter,
            threshold=config.threshold,
            standardize=config.standardize,
            store_all=config.store_all_alphas,
        )
        stored = path.stored() if config.store_all_alphas else ()
        result = path.best_fit.replace(alpha_path=path, stored_fits=stored)
    return result.replace(config=config)


def fitted(fit: FitResult, scale: str = "standardized") -> np.ndarray:
    """Λ̂a_{t|n} for every cell, on the estimation or the original scale."""
    if scale not in SCALES:
        raise ModelError(f"scale must be one of {SCALES}, got {scale!r}")
    return fit.fitted_scaled if scale == "standardized" else fit.fitted_unscaled


def residuals(fit: FitResult) -> np.ndarray:
    """Estimation-scale residuals; NaN marks cells that were not observed."""
    return fit.residuals_scaled


@dataclass(frozen=True)
class Forecast:
    """h-step forecasts from the end of the sample.

    ``series`` is in original units; ``series_var`` includes measurement
    noise and is in squared original units.
    """

    factors: np.ndarray
    factor_covs: np.ndarray
    series: np.ndarray
    series_scaled: np.ndarray
    series_var: np.ndarray
    names: tuple

    @property
    def h(self) -> int:
        return self.factors.shape[0]

    def to_frames(self) -> Dict[str, pd.DataFrame]:
        steps = pd.Index(range(1, self.h + 1), name="h")
        r = self.factors.shape[1]
        return {
            "forecast_factors": pd.DataFrame(
                self.factors, index=steps, columns=[f"F{j + 1}" for j in range(r)]
            ),
            "forecast_series": pd.DataFrame(
                self.series, index=steps, columns=list(self.names)
            ),
            "forecast_variance": pd.DataFrame(
                self.series_var, index=steps, columns=list(self.names)
            ),
        }


def predict_h(fit: FitResult, h: int) -> Forecast:
    """Propagate the filtered end-of-sample state ``h`` steps ahead.

    With AR(1) errors the idiosyncratic states are propagated too and added
    to the series forecasts.

    Raises:
        ModelError: h < 1, or the fit has no transition dynamics (PCA)
    """
    if h < 1:
        raise ModelError(f"h must be at least 1, got {h}")
    if not fit.is_dynamic:
        raise ModelError(
            f"{fit.config.alg.value} fits have no factor dynamics; "
            "use 2Stage, EM or EM-sparse to forecast"
        )
    params, ar1, r = fit.params, fit.ar1, fit.r
    if ar1 is None:
        A, Q = params.A, params.Sigma_u
        Z = params.Lambda
        noise = params.sigma_eps
    else:
        A = block_diag(params.A, np.diag(ar1.phi))
        Q = block_diag(params.Sigma_u, np.diag(ar1.sigma_e))
        Z = np.hstack([params.Lambda, np.eye(params.p)])
        noise = np.full(params.p, ar1.kappa)

    a = fit.kfs.a_filt[-1]
    P = fit.kfs.P_filt[-1]
    factors = np.empty((h, r))
    factor_covs = np.empty((h, r, r))
    series = np.empty((h, params.p))
    series_var = np.empty((h, params.p))
    for k in range(h):
        a = A @ a
        P = A @ P @ A.T + Q
        P = 0.5 * (P + P.T)
        factors[k] = a[:r]
        factor_covs[k] = P[:r, :r]
        series[k] = Z @ a
        series_var[k] = np.einsum("ij,jk,ik->i", Z, P, Z) + noise

    sds = fit.standardizer.sds
    return Forecast(
        factors=factors,
        factor_covs=factor_covs,
        series=fit.standardizer.unscale(series),
        series_scaled=series,
        series_var=series_var * sds**2,
        names=tuple(fit.panel.names),
    )


def refilter(fit: FitResult, panel: TimePanel) -> FitResult:
    """Re-run the smoother on new data with the parameters of ``fit``."""
    return smooth_with_params(
        panel,
        fit.params,
        fit.ar1,
        fit.config.engine,
        fit.config.standardize,
        config=fit.config,
    )


def summary(fit: FitResult) -> Dict[str, Any]:
    """Plain-data description of a fit, for reports."""
    info: Dict[str, Any] = {
        "alg": fit.config.alg.value,
        "err": fit.config.err.value,
        "engine": fit.config.engine.value,
        "n": fit.n,
        "p": fit.p,
        "r": fit.r,
        "q": fit.config.q,
        "standardize": fit.config.standardize,
        "nonzero_loadings": fit.nonzero_count,
        "zero_loadings": fit.zero_count,
        "A": fit.params.A.tolist(),
        "Sigma_u": fit.params.Sigma_u.tolist(),
        "loglik": fit.loglik,
    }
    if fit.em_log is not None:
        info["em_iterations"] = fit.em_log.iterations
        info["em_converged"] = fit.em_log.converged
    if fit.alpha is not None:
        info["alpha"] = fit.alpha
    if fit.alpha_path is not None:
        info["alphas_tried"] = len(fit.alpha_path.alphas)
        info["total_em_iterations"] = fit.alpha_path.total_em_iterations
    if fit.ar1 is not None:
        info["phi_median"] = float(np.median(fit.ar1.phi))
    return info

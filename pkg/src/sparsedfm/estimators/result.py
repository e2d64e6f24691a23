# src/sparsedfm/estimators/result.py
"""Containers returned by every estimation path."""

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Optional, Tuple

import numpy as np

from ..config.options import FitConfig
from ..data.imputation import Standardizer, standardize
from ..data.panel import TimePanel
from ..kalman.base import KfsOutput
from ..sparse.admm import AdmmState
from ..statespace.params import Ar1Params, DfmParams

if TYPE_CHECKING:
    from ..tuning.alpha import AlphaPath


@dataclass(frozen=True)
class EmLog:
    """Per-iteration record of one EM run.

    ``m_values[0]`` is NaN: the relative change needs two likelihoods.
    ``penalized`` is ℓ − α‖Λ‖₁ and equals ``logliks`` for dense EM.
    """

    logliks: Tuple[float, ...] = ()
    m_values: Tuple[float, ...] = ()
    penalized: Tuple[float, ...] = ()
    iterations: int = 0
    converged: bool = False
    admm_iterations: int = 0

    @property
    def final_loglik(self) -> float:
        return self.logliks[-1] if self.logliks else float("nan")


@dataclass(frozen=True)
class EmState:
    """What the next EM run needs to warm-start from this one."""

    params: DfmParams
    ar1: Optional[Ar1Params] = None
    admm: Optional[AdmmState] = None
    alpha0_aug: Optional[np.ndarray] = None
    P0_aug: Optional[np.ndarray] = None


def prepare_panel(
    panel: TimePanel, scale: bool = True
) -> Tuple[TimePanel, Standardizer]:
    """The estimation-scale panel and the map back to the original units."""
    if not scale:
        return panel, Standardizer.identity(panel.p)
    values, scaler = standardize(panel.values, panel.mask, panel.names)
    return panel.with_values(values), scaler


@dataclass(frozen=True)
class FitResult:
    """A fitted model together with the data it was fitted on.

    Fitted values are the common component Λ̂a_{t|n}; residuals are defined on
    observed cells only and are NaN elsewhere.
    """

    config: FitConfig
    panel: TimePanel
    scaled: TimePanel
    standardizer: Standardizer
    params: DfmParams
    factors: np.ndarray
    factor_covs: np.ndarray
    fitted_scaled: np.ndarray
    fitted_unscaled: np.ndarray
    residuals_scaled: np.ndarray
    ar1: Optional[Ar1Params] = None
    kfs: Optional[KfsOutput] = None
    em_log: Optional[EmLog] = None
    em_state: Optional[EmState] = None
    alpha: Optional[float] = None
    alpha_path: Optional["AlphaPath"] = None
    stored_fits: Tuple["FitResult", ...] = field(default=())

    @property
    def n(self) -> int:
        return self.panel.n

    @property
    def p(self) -> int:
        return self.panel.p

    @property
    def r(self) -> int:
        return self.params.r

    @property
    def is_dynamic(self) -> bool:
        return self.kfs is not None

    @property
    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.params.Lambda))

    @property
    def zero_count(self) -> int:
        return int(self.params.Lambda.size - self.nonzero_count)

    @property
    def loglik(self) -> Optional[float]:
        return self.kfs.loglik if self.kfs is not None else None

    @property
    def idiosyncratic(self) -> Optional[np.ndarray]:
        """Smoothed AR(1) idiosyncratic states (n×p), AR1 fits only."""
        if self.ar1 is None or self.kfs is None:
            return None
        return self.kfs.a_smooth[:, self.r :]

    def rss(self) -> float:
        """Mean squared residual over observed cells, on the estimation scale."""
        return float(np.nanmean(self.residuals_scaled**2))

    def replace(self, **changes) -> "FitResult":
        return replace(self, **changes)


def build_result(
    config: FitConfig,
    panel: TimePanel,
    scaled: TimePanel,
    standardizer: Standardizer,
    params: DfmParams,
    factors: np.ndarray,
    factor_covs: Optional[np.ndarray] = None,
    **extra,
) -> FitResult:
    """Derive fitted values and residuals from factors and loadings."""
    r = params.r
    factors = np.asarray(factors, dtype=float)[:, :r]
    if factor_covs is None:
        factor_covs = np.zeros((panel.n, r, r))
    fitted_scaled = factors @ params.Lambda.T
    residuals = np.where(scaled.mask, scaled.values - fitted_scaled, np.nan)
    return FitResult(
        config=config,
        panel=panel,
        scaled=scaled,
        standardizer=standardizer,
        params=params,
        factors=factors,
        factor_covs=np.asarray(factor_covs)[:, :r, :r],
        fitted_scaled=fitted_scaled,
        fitted_unscaled=standardizer.unscale(fitted_scaled),
        residuals_scaled=residuals,
        **extra,
    )

# src/sparsedfm/tuning/alpha.py
"""BIC-driven search over the L1 penalty grid."""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..config.options import ErrorModel, KalmanEngine
from ..data.panel import TimePanel
from ..errors import TuningError
from ..estimators.em import em_fit
from ..estimators.result import FitResult

logger = logging.getLogger(__name__)


def logspace(lo_exp: float, hi_exp: float, count: int) -> np.ndarray:
    """``count`` values 10^x, x equally spaced on [lo_exp, hi_exp]."""
    if count < 2:
        raise TuningError(f"grid needs at least two points, got {count}")
    if not hi_exp > lo_exp:
        raise TuningError(f"grid must be increasing, got {lo_exp}:{hi_exp}")
    return 10.0 ** np.linspace(lo_exp, hi_exp, count)


def bic_alpha(rss: float, m: int, n: int, p: int) -> float:
    """log(V) + m·log(np)/(np)"""
    if not rss > 0:
        raise TuningError(f"residual variance must be positive, got {rss}")
    np_ = n * p
    return float(np.log(rss) + m * np.log(np_) / np_)


def has_zero_column(Lambda: np.ndarray) -> bool:
    return bool(np.any(np.all(Lambda == 0.0, axis=0)))


@dataclass(frozen=True)
class AlphaPath:
    """One entry per α visited, ascending.

    A degenerate final entry (some loadings column all zero) is recorded
    but never selected; ``stop_index`` points at it.
    """

    alphas: Tuple[float, ...]
    bic: Tuple[float, ...]
    nonzero: Tuple[int, ...]
    converged: Tuple[bool, ...]
    em_iterations: Tuple[int, ...]
    best_index: int
    stop_index: Optional[int] = None
    fits: Tuple[Optional[FitResult], ...] = ()

    @property
    def alpha_opt(self) -> float:
        return self.alphas[self.best_index]

    @property
    def best_fit(self) -> Optional[FitResult]:
        return self.fits[self.best_index] if self.fits else None

    @property
    def total_em_iterations(self) -> int:
        return int(sum(self.em_iterations))

    @property
    def completed(self) -> int:
        """Number of non-degenerate fits."""
        return len(self.alphas) if self.stop_index is None else self.stop_index

    def stored(self) -> Tuple[FitResult, ...]:
        return tuple(f for f in self.fits[: self.completed] if f is not None)

    def to_frame(self) -> pd.DataFrame:
        index = range(len(self.alphas))
        degenerate = [k == self.stop_index for k in index]
        return pd.DataFrame(
            {
                "alpha": self.alphas,
                "bic": self.bic,
                "nonzero": self.nonzero,
                "converged": [int(c) for c in self.converged],
                "em_iterations": self.em_iterations,
                "degenerate": [int(d) for d in degenerate],
                "selected": [int(k == self.best_index) for k in index],
            }
        )


def alpha_grid_search(
    panel: TimePanel,
    r: int,
    alphas: Sequence[float],
    q: int = 0,
    err: ErrorModel = ErrorModel.IID,
    engine: KalmanEngine = KalmanEngine.UNIVARIATE,
    max_iter: int = 100,
    threshold: float = 1e-4,
    standardize: bool = True,
    store_all: bool = False,
) -> AlphaPath:
    """Fit EM-sparse along an ascending α grid with warm starts.

    Each fit starts from the previous α's parameters and ADMM state. The
    sweep stops at the first fit with an all-zero loadings column. The
    selected α minimises BIC, ties going to the larger α.

    Raises:
        TuningError: Empty grid, or the smallest α is already degenerate
    """
    grid = np.unique(np.asarray(alphas, dtype=float))
    if grid.size == 0:
        raise TuningError("alpha grid is empty")
    if (grid < 0).any():
        raise TuningError("alphas must be nonnegative")

    visited, bics, nonzero, converged, iterations = [], [], [], [], []
    fits = []
    best_index, best_bic, best_fit = -1, np.inf, None
    stop_index = None
    warm = None
    for k, alpha in enumerate(grid):
        fit = em_fit(
            panel,
            r,
            err=err,
            engine=engine,
            max_iter=max_iter,
            threshold=threshold,
            alpha=float(alpha),
            q=q,
            warm=warm,
            standardize=standardize,
        )
        warm = fit.em_state
        m = fit.nonzero_count
        bic = bic_alpha(fit.rss(), m, fit.n, fit.p)
        visited.append(float(alpha))
        bics.append(bic)
        nonzero.append(m)
        converged.append(fit.em_log.converged)
        iterations.append(fit.em_log.iterations)
        logger.debug("alpha=%.6g bic=%.6f nonzero=%d", alpha, bic, m)

        if has_zero_column(fit.params.Lambda):
            if k == 0:
                raise TuningError(
                    f"a loadings column is entirely zero at the smallest alpha "
                    f"({alpha:.6g}); start the grid lower"
                )
            stop_index = k
            fits.append(fit if store_all else None)
            logger.info("Zero loadings column at alpha=%.6g, search stopped", alpha)
            break

        fits.append(fit if store_all else None)
        if bic <= best_bic:
            best_index, best_bic, best_fit = k, bic, fit

    fits[best_index] = best_fit

    path = AlphaPath(
        alphas=tuple(visited),
        bic=tuple(bics),
        nonzero=tuple(nonzero),
        converged=tuple(converged),
        em_iterations=tuple(iterations),
        best_index=best_index,
        stop_index=stop_index,
        fits=tuple(fits),
    )
    logger.info(
        "Selected alpha=%.6g after %d fits (%d EM iterations)",
        path.alpha_opt,
        len(visited),
        path.total_em_iterations,
    )
    return path

# src/sparsedfm/data/imputation.py
"""Balancing and standardizing panels before estimation."""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from ..errors import DataError
from .panel import TimePanel

logger = logging.getLogger(__name__)

MIN_SPLINE_POINTS = 3


def _centered_ma3(x: np.ndarray, cells: np.ndarray) -> np.ndarray:
    """Centered 3-term mean at ``cells``; windows shrink at the series ends."""
    out = x.copy()
    n = len(x)
    for t in cells:
        lo, hi = max(t - 1, 0), min(t + 2, n)
        out[t] = x[lo:hi].mean()
    return out


def fill_na(panel: TimePanel) -> Tuple[np.ndarray, np.ndarray]:
    """Balance a panel for PCA initialisation.

    Internal gaps get a natural cubic spline through the column's observed
    points. Leading and trailing gaps get the column median, then those
    filled cells (only) are smoothed with a centered MA(3).

    Returns:
        (balanced n×p matrix, original observation mask)

    Raises:
        DataError: A column has fewer than three observations
    """
    n, p = panel.values.shape
    balanced = np.array(panel.values)
    mask = np.array(panel.mask)
    if mask.all():
        return balanced, mask

    times = np.arange(n, dtype=float)
    for i in range(p):
        observed = mask[:, i]
        if observed.all():
            continue
        t_obs = np.flatnonzero(observed)
        if t_obs.size < MIN_SPLINE_POINTS:
            raise DataError(
                f"needs at least {MIN_SPLINE_POINTS} observations to fill gaps, "
                f"has {t_obs.size}",
                column=panel.names[i],
            )
        x_obs = balanced[t_obs, i]
        first, last = t_obs[0], t_obs[-1]

        inside = np.flatnonzero(~observed[first : last + 1]) + first
        if inside.size:
            spline = CubicSpline(times[t_obs], x_obs, bc_type="natural")
            balanced[inside, i] = spline(times[inside])

        edges = np.concatenate([np.arange(0, first), np.arange(last + 1, n)])
        if edges.size:
            column = balanced[:, i]
            column[edges] = np.median(x_obs)
            balanced[:, i] = _centered_ma3(column, edges)

    logger.debug("Filled %d missing cells", int((~mask).sum()))
    return balanced, mask


def _label(names: Optional[Sequence[str]], i: int) -> str:
    return str(names[i]) if names is not None else f"#{i + 1}"


@dataclass(frozen=True)
class Standardizer:
    means: np.ndarray
    sds: np.ndarray

    @classmethod
    def identity(cls, p: int) -> "Standardizer":
        return cls(np.zeros(p), np.ones(p))

    def scale(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.means) / self.sds

    def unscale(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float) * self.sds + self.means


def standardize(
    matrix: np.ndarray,
    mask: np.ndarray,
    names: Optional[Sequence[str]] = None,
) -> Tuple[np.ndarray, Standardizer]:
    """Column-wise z-scores from observed cells (sd with ddof=1).

    Cells outside ``mask`` come back as NaN.

    Raises:
        DataError: A column has fewer than two observed cells or zero variance
    """
    matrix = np.asarray(matrix, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    observed = np.where(mask, matrix, np.nan)

    counts = mask.sum(axis=0)
    if (counts < 2).any():
        i = int(np.flatnonzero(counts < 2)[0])
        raise DataError(
            "needs at least two observed values", column=_label(names, i)
        )

    means = np.nanmean(observed, axis=0)
    sds = np.nanstd(observed, axis=0, ddof=1)
    if (sds <= 0).any():
        i = int(np.flatnonzero(sds <= 0)[0])
        raise DataError("column has zero variance", column=_label(names, i))

    scaler = Standardizer(means, sds)
    return scaler.scale(observed), scaler

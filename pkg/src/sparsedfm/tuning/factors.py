# src/sparsedfm/tuning/factors.py
"""Choosing the number of factors with the Bai–Ng information criteria."""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
import pandas as pd

from ..data.imputation import fill_na
from ..data.panel import TimePanel
from ..errors import NumericalError, TuningError
from ..estimators.result import prepare_panel

logger = logging.getLogger(__name__)

R_MAX_CAP = 15
IC_TYPES = (1, 2, 3)


@dataclass(frozen=True)
class IcTable:
    """Criteria for r = 1..r_max plus the eigenvalues they came from.

    ``shares`` are the variance-explained fractions of all p eigenvalues.
    """

    r: np.ndarray
    V: np.ndarray
    ic1: np.ndarray
    ic2: np.ndarray
    ic3: np.ndarray
    eigenvalues: np.ndarray
    shares: np.ndarray
    ic_type: int = 2

    def criterion(self, ic_type: int) -> np.ndarray:
        if ic_type not in IC_TYPES:
            raise TuningError(f"ic_type must be one of {IC_TYPES}, got {ic_type}")
        return {1: self.ic1, 2: self.ic2, 3: self.ic3}[ic_type]

    def chosen(self, ic_type: Optional[int] = None) -> int:
        """argmin of the criterion; ties go to the smaller r."""
        values = self.criterion(ic_type or self.ic_type)
        return int(self.r[int(np.argmin(values))])

    @property
    def best(self) -> int:
        return self.chosen()

    def chosen_all(self) -> Dict[str, int]:
        return {f"IC{k}": self.chosen(k) for k in IC_TYPES}

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "r": self.r,
                "V": self.V,
                "IC1": self.ic1,
                "IC2": self.ic2,
                "IC3": self.ic3,
                "eigenvalue": self.eigenvalues[: len(self.r)],
                "share": self.shares[: len(self.r)],
            }
        )


def default_r_max(p: int) -> int:
    return min(R_MAX_CAP, p - 1)


def tune_factors(
    panel: TimePanel,
    r_max: Optional[int] = None,
    ic_type: int = 2,
    standardize: bool = True,
) -> IcTable:
    """Evaluate IC1-IC3 for every r up to ``r_max``.

    V_r is the mean squared PCA residual, which equals the sum of the
    discarded eigenvalues of XᵀX/n divided by p, so one eigendecomposition
    covers every r. Gaps are filled before the columns are z-scored.

    Raises:
        TuningError: r_max out of range or unknown ic_type
    """
    if ic_type not in IC_TYPES:
        raise TuningError(f"ic_type must be one of {IC_TYPES}, got {ic_type}")
    n, p = panel.n, panel.p
    limit = min(n, p) - 1
    if r_max is None:
        r_max = min(default_r_max(p), limit)
    if not 1 <= r_max <= limit:
        raise TuningError(f"r_max must lie in [1, {limit}], got {r_max}")

    filled, _ = fill_na(panel)
    scaled, _ = prepare_panel(panel.with_values(filled), standardize)
    balanced = scaled.values
    try:
        eigenvalues = np.linalg.eigvalsh(balanced.T @ balanced / n)[::-1]
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"eigendecomposition failed: {e}") from e
    eigenvalues = np.maximum(eigenvalues, 0.0)

    r = np.arange(1, r_max + 1)
    tail = np.cumsum(eigenvalues[::-1])[::-1]
    V = np.array([tail[k] if k < p else 0.0 for k in r]) / p
    if (V <= 0).any():
        raise TuningError("residual variance is zero; r_max is too large")

    log_V = np.log(V)
    scale = (n + p) / (n * p)
    c = min(n, p)
    ic1 = log_V + r * scale * np.log(1.0 / scale)
    ic2 = log_V + r * scale * np.log(c)
    ic3 = log_V + r * np.log(c) / c
    shares = eigenvalues / eigenvalues.sum()

    table = IcTable(r, V, ic1, ic2, ic3, eigenvalues, shares, ic_type)
    logger.info("IC%d selects r=%d (r_max=%d)", ic_type, table.best, r_max)
    return table

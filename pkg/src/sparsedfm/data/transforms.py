# src/sparsedfm/data/transforms.py
"""Stationarity transforms, their inverses and the ragged edge."""

import enum
import logging
from typing import Sequence

import numpy as np
import pandas as pd

from ..errors import DataError
from .panel import TimePanel

logger = logging.getLogger(__name__)


class TransformCode(enum.IntEnum):
    LEVEL = 1
    DIFF = 2
    DIFF2 = 3
    LOG_DIFF = 4
    LOG_DIFF2 = 5
    GROWTH = 6
    LOG_GROWTH = 7

    @property
    def uses_log(self) -> bool:
        return self in (
            TransformCode.LOG_DIFF,
            TransformCode.LOG_DIFF2,
            TransformCode.LOG_GROWTH,
        )

    @property
    def order(self) -> int:
        """Number of leading rows consumed."""
        if self is TransformCode.LEVEL:
            return 0
        if self in (TransformCode.DIFF2, TransformCode.LOG_DIFF2):
            return 2
        return 1

    @classmethod
    def parse(cls, code) -> "TransformCode":
        try:
            return cls(int(code))
        except (TypeError, ValueError):
            raise DataError(f"unknown transform code {code!r}; expected 1-7")


def _transform_column(x: pd.Series, code: TransformCode) -> pd.Series:
    if code.uses_log:
        x = np.log(x)
    if code is TransformCode.LEVEL:
        return x
    if code in (TransformCode.DIFF, TransformCode.LOG_DIFF, TransformCode.LOG_GROWTH):
        return x.diff()
    if code in (TransformCode.DIFF2, TransformCode.LOG_DIFF2):
        return x.diff().diff()
    return x.pct_change(fill_method=None)


def transform_data(panel: TimePanel, codes: Sequence[int]) -> TimePanel:
    """Apply one transform code per column.

    Differencing blanks the leading rows it consumes, and a missing input
    blanks every output that references it.

    Raises:
        DataError: Wrong number of codes, unknown code, or a nonpositive
            observed value under a log code
    """
    if len(codes) != panel.p:
        raise DataError(f"expected {panel.p} transform codes, got {len(codes)}")
    parsed = [TransformCode.parse(c) for c in codes]

    frame = pd.DataFrame(np.array(panel.values), columns=list(panel.names))
    out = {}
    for name, code in zip(panel.names, parsed):
        column = frame[name]
        if code.uses_log and (column.dropna() <= 0).any():
            raise DataError(
                f"code {int(code)} takes logs but the column has nonpositive values",
                column=name,
            )
        out[name] = _transform_column(column, code)

    result = pd.DataFrame(out)[list(panel.names)].to_numpy(dtype=float)
    return panel.with_values(result)


def undifference(
    diffs: Sequence[float], code: int, history: Sequence[float]
) -> np.ndarray:
    """Rebuild levels from transformed values.

    Args:
        diffs: Transformed values for consecutive periods
        code: Transform code that produced them
        history: The most recent observed levels before the first period,
            oldest first; codes 3 and 5 need two, the others one (code 1
            needs none)

    Returns:
        Levels, one per entry of ``diffs``
    """
    code = TransformCode.parse(code)
    diffs = np.asarray(diffs, dtype=float)
    if len(history) < code.order:
        raise DataError(f"code {int(code)} needs {code.order} prior levels")

    prev = [float(h) for h in history[len(history) - code.order :]]
    if code.uses_log:
        prev = [np.log(h) for h in prev]

    levels = np.empty_like(diffs)
    for k, d in enumerate(diffs):
        if code is TransformCode.LEVEL:
            level = d
        elif code is TransformCode.GROWTH:
            level = prev[-1] * (1.0 + d)
        elif code.order == 1:
            level = prev[-1] + d
        else:
            level = 2.0 * prev[-1] - prev[-2] + d
        if code.order:
            prev = prev[1:] + [level]
        levels[k] = np.exp(level) if code.uses_log else level
    return levels


def ragged_edge(panel: TimePanel, lags: Sequence[int]) -> TimePanel:
    """Blank the final ``lags[i]`` rows of column ``i``."""
    lags = np.asarray(lags)
    if lags.shape != (panel.p,):
        raise DataError(f"expected {panel.p} lags, got {lags.size}")
    if not np.issubdtype(lags.dtype, np.integer):
        if not np.all(np.equal(np.mod(lags, 1), 0)):
            raise DataError("lags must be integers")
        lags = lags.astype(int)
    if (lags < 0).any():
        raise DataError("lags must be nonnegative")
    if (lags >= panel.n).any():
        raise DataError(f"every lag must be smaller than n = {panel.n}")

    values = np.array(panel.values)
    for i, lag in enumerate(lags):
        if lag:
            values[panel.n - lag :, i] = np.nan
    return panel.with_values(values)


def missing_runs(observed: np.ndarray) -> list:
    """(start, end) row positions, inclusive, of each missing stretch."""
    runs = []
    start = None
    for t, ok in enumerate(observed):
        if not ok and start is None:
            start = t
        elif ok and start is not None:
            runs.append((start, t - 1))
            start = None
    if start is not None:
        runs.append((start, len(observed) - 1))
    return runs


def missing_summary(panel: TimePanel) -> pd.DataFrame:
    """One row per column: missing count, number of runs and their spans.

    Spans use 1-based row numbers, ``start-end`` separated by ``;``.
    """
    rows = []
    for i, name in enumerate(panel.names):
        runs = missing_runs(panel.mask[:, i])
        rows.append(
            {
                "column": name,
                "missing": int((~panel.mask[:, i]).sum()),
                "runs": len(runs),
                "spans": ";".join(f"{a + 1}-{b + 1}" for a, b in runs),
            }
        )
    return pd.DataFrame(rows, columns=["column", "missing", "runs", "spans"])

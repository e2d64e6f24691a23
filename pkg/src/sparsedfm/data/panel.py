# src/sparsedfm/data/panel.py
"""The TimePanel container and CSV ingest/emission."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..errors import DataError

logger = logging.getLogger(__name__)

MISSING_TOKENS = {"NA", ""}
FLOAT_FORMAT = "%.17g"
INDEX_LABEL = "time"


@dataclass(frozen=True)
class TimePanel:
    """An n×p panel of observations with NaN marking missing cells.

    ``mask`` is true where a cell is observed. Row order is time order; ``index``
    holds the (opaque, unique) time labels.
    """

    values: np.ndarray
    mask: np.ndarray
    names: Tuple[str, ...]
    index: Tuple[str, ...]

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise DataError(f"panel must be two-dimensional, got shape {values.shape}")
        n, p = values.shape
        if n < 2 or p < 1:
            raise DataError(f"panel needs n >= 2 rows and p >= 1 columns, got {n}x{p}")

        mask = np.array(self.mask, dtype=bool)
        if mask.shape != values.shape:
            raise DataError("mask shape does not match values")
        if not np.array_equal(mask, ~np.isnan(values)):
            raise DataError("mask must be false exactly where values are missing")
        if np.isinf(values).any():
            raise DataError("panel contains infinite values")

        names = tuple(str(c) for c in self.names)
        index = tuple(str(t) for t in self.index)
        if len(names) != p:
            raise DataError(f"expected {p} column names, got {len(names)}")
        if len(set(names)) != p:
            raise DataError("column names must be unique")
        if len(index) != n:
            raise DataError(f"expected {n} time labels, got {len(index)}")
        if len(set(index)) != n:
            raise DataError("time labels must be unique")

        values.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "index", index)

    @classmethod
    def from_array(
        cls,
        values: np.ndarray,
        names: Optional[Sequence[str]] = None,
        index: Optional[Sequence[str]] = None,
    ) -> "TimePanel":
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        n, p = values.shape
        if names is None:
            names = [f"X{i + 1}" for i in range(p)]
        if index is None:
            index = [str(t + 1) for t in range(n)]
        return cls(values, ~np.isnan(values), tuple(names), tuple(index))

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "TimePanel":
        return cls.from_array(
            frame.to_numpy(dtype=float),
            names=[str(c) for c in frame.columns],
            index=[str(t) for t in frame.index],
        )

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def with_values(self, values: np.ndarray) -> "TimePanel":
        """Same labels, new values (mask recomputed from NaN)."""
        return TimePanel.from_array(values, self.names, self.index)

    def head(self, rows: int) -> "TimePanel":
        """The first ``rows`` rows"""
        return TimePanel.from_array(
            self.values[:rows], self.names, self.index[:rows]
        )

    def columns(self, idx: Sequence[int]) -> "TimePanel":
        idx = list(idx)
        return TimePanel.from_array(
            self.values[:, idx], [self.names[i] for i in idx], self.index
        )

    def column_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DataError(f"unknown column '{name}'")

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            np.array(self.values), columns=list(self.names), index=list(self.index)
        )
        frame.index.name = INDEX_LABEL
        return frame


def _parse_cell(cell, source: str, row: int, column: str) -> float:
    if isinstance(cell, float) and np.isnan(cell):
        raise DataError("row is shorter than the header", source, row, column)
    text = str(cell).strip()
    if text in MISSING_TOKENS:
        return np.nan
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"cannot parse '{text}' as a number", source, row, column)
    if np.isnan(value):
        return np.nan
    return value


def load_csv(path: Union[str, Path], has_index: bool = False) -> TimePanel:
    """Read a panel from CSV.

    Cells equal to ``NA`` or empty become missing. With ``has_index`` the
    first column is taken as the time labels.

    Args:
        path: CSV file with a mandatory header row
        has_index: Whether the first column holds time labels

    Returns:
        TimePanel with columns in file order

    Raises:
        DataError: Missing file, ragged rows, bad numbers or duplicate names
    """
    path = Path(path)
    source = str(path)
    if not path.exists():
        raise DataError("file not found", source)

    try:
        raw = pd.read_csv(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
            encoding="utf-8",
        )
    except pd.errors.ParserError as e:
        raise DataError(f"rows are not rectangular ({e})", source)
    except pd.errors.EmptyDataError:
        raise DataError("file is empty", source)

    header = [str(h).strip() for h in raw.iloc[0].tolist()]
    body = raw.iloc[1:]
    if has_index:
        header = header[1:]
        labels = [str(t).strip() for t in body.iloc[:, 0].tolist()]
        body = body.iloc[:, 1:]
    else:
        labels = [str(t + 1) for t in range(len(body))]

    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise DataError(f"duplicate column names: {', '.join(dupes)}", source)

    values = np.empty(body.shape, dtype=float)
    for t, row in enumerate(body.itertuples(index=False)):
        for i, cell in enumerate(row):
            # +2: one for the header, one for 1-based row numbers
            values[t, i] = _parse_cell(cell, source, t + 2, header[i])

    logger.debug("Loaded %s: %d rows x %d columns", source, *values.shape)
    return TimePanel.from_array(values, header, labels)


def write_csv(
    data: Union[TimePanel, pd.DataFrame],
    path: Union[str, Path],
    index: bool = False,
) -> Path:
    """Write a panel or frame with full double precision and ``NA`` for missing.

    The output reparses under ``load_csv(path, has_index=index)`` with
    identical values.
    """
    frame = data.to_frame() if isinstance(data, TimePanel) else data
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(
        path,
        index=index,
        index_label=INDEX_LABEL if index else None,
        float_format=FLOAT_FORMAT,
        na_rep="NA",
    )
    return path


def matrix_frame(
    matrix: np.ndarray,
    columns: Sequence[str],
    index: Optional[Sequence[str]] = None,
) -> pd.DataFrame:
    """Wrap a 2-D array for ``write_csv``."""
    frame = pd.DataFrame(np.asarray(matrix, dtype=float), columns=list(columns))
    if index is not None:
        frame.index = list(index)
    return frame


def _read_spec_row(path: Union[str, Path], names: Sequence[str], what: str) -> list:
    path = Path(path)
    source = str(path)
    if not path.exists():
        raise DataError("file not found", source)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"cannot read {what} ({e})", source)
    if len(frame) != 1:
        raise DataError(f"{what} file needs exactly one value row", source)
    frame.columns = [str(c).strip() for c in frame.columns]
    out = []
    for name in names:
        if name not in frame.columns:
            raise DataError(f"no {what} entry", source, column=name)
        out.append(str(frame.at[0, name]).strip())
    return out


def read_column_spec(
    path: Union[str, Path], names: Sequence[str], what: str = "values"
) -> list:
    """Integers keyed by column name: a header row and one value row.

    Returns:
        One integer per entry of ``names``, in that order

    Raises:
        DataError: Missing file or column, extra rows, non-integer cells
    """
    out = []
    for name, text in zip(names, _read_spec_row(path, names, what)):
        try:
            out.append(int(text))
        except ValueError:
            raise DataError(f"'{text}' is not an integer", str(path), 2, name)
    return out


def read_column_labels(
    path: Union[str, Path], names: Sequence[str], what: str = "groups"
) -> list:
    """Text labels keyed by column name, in the same layout as ``read_column_spec``.

    Raises:
        DataError: Missing file or column, extra rows, blank labels
    """
    labels = _read_spec_row(path, names, what)
    for name, text in zip(names, labels):
        if not text:
            raise DataError(f"blank {what} entry", str(path), 2, name)
    return labels

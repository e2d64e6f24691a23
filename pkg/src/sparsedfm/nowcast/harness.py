# src/sparsedfm/nowcast/harness.py
"""Pseudo real-time nowcasting over expanding windows."""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import (
    Callable,
    Dict,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np
import pandas as pd

from ..config.options import FitConfig, resolve_threads
from ..data.panel import TimePanel
from ..data.transforms import (
    TransformCode,
    ragged_edge,
    transform_data,
    undifference,
)
from ..errors import DataError, ModelError, SparseDfmError
from ..estimators.result import FitResult
from ..model.api import refilter, sparse_dfm_fit

logger = logging.getLogger(__name__)

QUANTILES = (0.0, 0.25, 0.5, 0.75, 1.0)

ModelSpec = Union[FitConfig, Callable[[TimePanel], FitResult]]


@dataclass(frozen=True)
class HarnessConfig:
    """Expanding-window settings.

    Window ``t`` uses the first ``t`` rows of the level panel, for
    t = start..end inclusive.
    """

    targets: Tuple[int, ...]
    lags: Tuple[int, ...]
    codes: Tuple[int, ...]
    start: int
    end: int
    models: Mapping[str, ModelSpec] = field(default_factory=dict)
    reuse_params: bool = False
    threads: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(i) for i in self.targets))
        object.__setattr__(self, "lags", tuple(int(v) for v in self.lags))
        object.__setattr__(
            self, "codes", tuple(int(TransformCode.parse(c)) for c in self.codes)
        )
        object.__setattr__(self, "models", dict(self.models))
        if not self.targets:
            raise ModelError("at least one target column is required")
        if len(set(self.targets)) != len(self.targets):
            raise ModelError("target columns must be distinct")
        if not self.models:
            raise ModelError("at least one model is required")
        if self.start > self.end:
            raise ModelError(f"window start {self.start} is after end {self.end}")
        if any(self.lags[i] < 1 for i in self.targets if i < len(self.lags)):
            raise ModelError("every target needs a publication lag of at least 1")

    @property
    def windows(self) -> Tuple[int, ...]:
        return tuple(range(self.start, self.end + 1))

    @property
    def horizons(self) -> Tuple[int, ...]:
        return tuple(range(1, max(self.lags[i] for i in self.targets) + 1))

    def validate(self, panel: TimePanel):
        p, n = panel.p, panel.n
        if len(self.lags) != p or len(self.codes) != p:
            raise ModelError(f"lags and codes need one entry per column ({p})")
        if any(not 0 <= i < p for i in self.targets):
            raise ModelError(f"target indices must lie in [0, {p - 1}]")
        if self.end > n:
            raise ModelError(f"window end {self.end} exceeds the {n} rows")
        if self.start <= max(self.lags) + 2:
            raise ModelError("the first window leaves no observed rows to fit")


@dataclass(frozen=True)
class HarnessReport:
    """Absolute nowcast errors indexed [window, model, horizon].

    Errors are averaged over the targets that have the horizon; ``scaled``
    divides each target's error by the sd of its observed levels in the
    window first. NaN marks failed windows.
    """

    windows: Tuple[int, ...]
    models: Tuple[str, ...]
    horizons: Tuple[int, ...]
    errors: np.ndarray
    scaled: np.ndarray
    failures: Dict[Tuple[int, str], str] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for w, window in enumerate(self.windows):
            for m, model in enumerate(self.models):
                for k, h in enumerate(self.horizons):
                    rows.append(
                        {
                            "window": window,
                            "model": model,
                            "horizon": h,
                            "abs_error": self.errors[w, m, k],
                            "scaled_error": self.scaled[w, m, k],
                        }
                    )
        return pd.DataFrame(rows)

    def summary(self) -> pd.DataFrame:
        """Mean and quantiles per model and horizon, recomputed from errors."""
        rows = []
        for m, model in enumerate(self.models):
            for k, h in enumerate(self.horizons):
                row = {"model": model, "horizon": h}
                try:
                    row.update(mae_quantiles(self.errors[:, m, k]))
                    row["scaled_mean"] = mae_quantiles(self.scaled[:, m, k])["mean"]
                except ModelError:
                    logger.warning("No finished windows for %s, h=%d", model, h)
                    continue
                rows.append(row)
        return pd.DataFrame(rows)


def mae_quantiles(errors: Sequence[float]) -> Dict[str, float]:
    """Mean and the 0/25/50/75/100% quantiles, linearly interpolated.

    NaN entries (failed windows) are dropped first.

    Raises:
        ModelError: No finite errors
    """
    values = np.asarray(errors, dtype=float)
    values = values[~np.isnan(values)]
    if values.size == 0:
        raise ModelError("no errors to summarise")
    qs = np.quantile(values, QUANTILES, method="linear")
    out = {"mean": float(values.mean())}
    for q, v in zip(QUANTILES, qs):
        out[f"q{int(round(q * 100))}"] = float(v)
    out["windows"] = int(values.size)
    return out


def _fit_model(
    spec: ModelSpec, data: TimePanel, base: Optional[FitResult]
) -> FitResult:
    if callable(spec) and not isinstance(spec, FitConfig):
        return spec(data)
    if base is not None:
        return refilter(base, data)
    return sparse_dfm_fit(data, spec)


def _target_errors(
    levels: TimePanel,
    ragged: TimePanel,
    fit: FitResult,
    config: HarnessConfig,
) -> Tuple[np.ndarray, np.ndarray]:
    """Undifference the fitted values in each target's hidden months."""
    t = levels.n
    H = len(config.horizons)
    raw = np.full((len(config.targets), H), np.nan)
    scaled = np.full_like(raw, np.nan)
    for j, i in enumerate(config.targets):
        lag = config.lags[i]
        first = t - lag
        code = TransformCode.parse(config.codes[i])
        # Undifferencing starts from the rows right before the hidden months
        anchor = ragged.values[max(first - code.order, 0) : first, i]
        if anchor.size < code.order or np.isnan(anchor).any():
            raise DataError(
                f"level missing in the {code.order} row(s) before the ragged edge",
                column=levels.names[i],
            )
        history = ragged.values[:first, i]
        history = history[~np.isnan(history)]
        nowcast = undifference(fit.fitted_unscaled[first:t, i], code, anchor)
        truth = levels.values[first:t, i]
        err = np.abs(nowcast - truth)
        sd = np.std(history, ddof=1) if history.size > 1 else np.nan
        raw[j, :lag] = err
        if sd > 0:
            scaled[j, :lag] = err / sd
    with np.errstate(all="ignore"):
        return _nanmean_cols(raw), _nanmean_cols(scaled)


def _nanmean_cols(M: np.ndarray) -> np.ndarray:
    counts = (~np.isnan(M)).sum(axis=0)
    sums = np.nansum(M, axis=0)
    return np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)


def _run_window(
    panel: TimePanel,
    t: int,
    config: HarnessConfig,
    bases: Dict[str, Optional[FitResult]],
) -> Tuple[int, Dict[str, Tuple[np.ndarray, np.ndarray]], Dict[str, str]]:
    levels = panel.head(t)
    ragged = ragged_edge(levels, config.lags)
    data = transform_data(ragged, config.codes)
    out, failures = {}, {}
    for name, spec in config.models.items():
        try:
            fit = _fit_model(spec, data, bases.get(name))
            out[name] = _target_errors(levels, ragged, fit, config)
        except SparseDfmError as e:
            logger.warning("Window %d, model %s failed: %s", t, name, e)
            failures[name] = str(e)
    return t, out, failures


def run_harness(
    panel: TimePanel,
    config: HarnessConfig,
    progress: Optional[Callable[[int], None]] = None,
) -> HarnessReport:
    """Evaluate every model over the expanding windows.

    A window never reads rows past its end. Windows run on up to
    ``config.threads`` (default SPARSEDFM_THREADS) workers and the report
    is assembled in window order.

    Args:
        panel: Panel in levels
        config: Harness settings
        progress: Called with the window index as each window finishes
    """
    config.validate(panel)
    windows = config.windows
    models = tuple(config.models)
    horizons = config.horizons

    bases: Dict[str, Optional[FitResult]] = {}
    if config.reuse_params:
        first = windows[0]
        data = transform_data(
            ragged_edge(panel.head(first), config.lags), config.codes
        )
        for name, spec in config.models.items():
            if isinstance(spec, FitConfig):
                bases[name] = sparse_dfm_fit(data, spec)
        logger.info("Reusing parameters estimated at window %d", first)

    threads = config.threads or resolve_threads()
    results: List = []
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(_run_window, panel, t, config, bases) for t in windows
        ]
        for future in as_completed(futures):
            t, out, failed = future.result()
            results.append((t, out, failed))
            logger.info("Window %d done", t)
            if progress is not None:
                progress(t)

    results.sort(key=lambda item: item[0])
    shape = (len(windows), len(models), len(horizons))
    errors = np.full(shape, np.nan)
    scaled = np.full(shape, np.nan)
    failures: Dict[Tuple[int, str], str] = {}
    for w, (t, out, failed) in enumerate(results):
        for m, name in enumerate(models):
            if name in out:
                errors[w, m], scaled[w, m] = out[name]
            if name in failed:
                failures[(t, name)] = failed[name]

    return HarnessReport(windows, models, horizons, errors, scaled, failures)

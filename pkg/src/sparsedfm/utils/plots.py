# src/sparsedfm/utils/plots.py
"""Static SVG figures for fits, tuning and data coverage."""

import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..data.panel import TimePanel  # noqa: E402
from ..errors import ModelError  # noqa: E402
from ..estimators.result import FitResult  # noqa: E402
from ..tuning.alpha import AlphaPath  # noqa: E402
from ..tuning.factors import IcTable  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
SIZE = 5


def _style(ax):
    ax.xaxis.grid(color="grey", linestyle="-", linewidth=0.5, alpha=0.5)
    ax.yaxis.grid(color="grey", linestyle="-", linewidth=0.5, alpha=0.5)


def _savefig(fig, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.debug("Wrote %s", path)
    return path


def factor_plot(fit: FitResult, path: PathLike, factor: int = 0) -> Path:
    """One smoothed factor with ±1.96 sd bands over the standardized series."""
    if not 0 <= factor < fit.r:
        raise ModelError(f"factor must lie in [0, {fit.r - 1}]")
    t = np.arange(1, fit.n + 1)
    fig, ax = plt.subplots(figsize=(SIZE * 16 / 7.3, SIZE))
    ax.plot(t, fit.scaled.values, color="lightgrey", lw=0.5)
    f = fit.factors[:, factor]
    sd = np.sqrt(np.maximum(fit.factor_covs[:, factor, factor], 0.0))
    ax.plot(t, f, color="tab:blue", label=f"factor {factor + 1}")
    ax.fill_between(t, f - 1.96 * sd, f + 1.96 * sd, color="tab:blue", alpha=0.2)
    ax.axhline(0, color="black", lw=0.5)
    ax.set(title=f"Factor {factor + 1}", xlabel="t")
    _style(ax)
    ax.legend(frameon=True, loc="upper left")
    return _savefig(fig, path)


def loading_heatmap(fit: FitResult, path: PathLike) -> Path:
    """Loadings as a diverging grid; exact zeros are left blank."""
    L = fit.params.Lambda
    shown = np.ma.masked_where(L == 0.0, L)
    bound = float(np.abs(L).max()) or 1.0
    fig, ax = plt.subplots(figsize=(2 + 0.6 * fit.r, 1 + 0.25 * fit.p))
    image = ax.imshow(
        shown,
        aspect="auto",
        cmap="RdBu_r",
        vmin=-bound,
        vmax=bound,
        interpolation="nearest",
    )
    ax.set_facecolor("white")
    ax.set_xticks(range(fit.r), [f"F{j + 1}" for j in range(fit.r)])
    ax.set_yticks(range(fit.p), list(fit.panel.names), fontsize=6)
    ax.set_title("Loadings")
    fig.colorbar(image, ax=ax)
    return _savefig(fig, path)


def loading_lineplot(fit: FitResult, path: PathLike, factor: int = 0) -> Path:
    if not 0 <= factor < fit.r:
        raise ModelError(f"factor must lie in [0, {fit.r - 1}]")
    values = fit.params.Lambda[:, factor]
    fig, ax = plt.subplots(figsize=(SIZE * 16 / 7.3, SIZE))
    ax.plot(range(fit.p), values, marker="o", color="tab:blue")
    ax.axhline(0, color="black", lw=0.5)
    ax.set_xticks(range(fit.p), list(fit.panel.names), rotation=90, fontsize=6)
    ax.set(title=f"Loadings on factor {factor + 1}")
    _style(ax)
    return _savefig(fig, path)


def loading_grouplineplot(
    fit: FitResult, path: PathLike, groups: Sequence[str], factor: int = 0
) -> Path:
    """Loadings on one factor with each series coloured by its group.

    Series are drawn in their panel order; the legend lists groups in order
    of first appearance.
    """
    if not 0 <= factor < fit.r:
        raise ModelError(f"factor must lie in [0, {fit.r - 1}]")
    if len(groups) != fit.p:
        raise ModelError(f"need one group per series ({fit.p}), got {len(groups)}")
    values = fit.params.Lambda[:, factor]
    labels = list(dict.fromkeys(groups))
    colours = plt.get_cmap("tab10" if len(labels) <= 10 else "tab20")
    fig, ax = plt.subplots(figsize=(SIZE * 16 / 7.3, SIZE))
    ax.plot(range(fit.p), values, color="lightgrey", lw=0.8)
    for k, label in enumerate(labels):
        rows = [i for i, g in enumerate(groups) if g == label]
        ax.scatter(rows, values[rows], color=colours(k % colours.N), label=label)
    ax.axhline(0, color="black", lw=0.5)
    ax.set_xticks(range(fit.p), list(fit.panel.names), rotation=90, fontsize=6)
    ax.set(title=f"Loadings on factor {factor + 1} by group")
    _style(ax)
    ax.legend(frameon=True, loc="upper right", fontsize=7)
    return _savefig(fig, path)


def residual_boxplot(fit: FitResult, path: PathLike) -> Path:
    res = fit.residuals_scaled
    columns = [res[~np.isnan(res[:, i]), i] for i in range(fit.p)]
    fig, ax = plt.subplots(figsize=(SIZE * 16 / 7.3, SIZE))
    ax.boxplot(columns)
    ax.set_xticks(range(1, fit.p + 1), list(fit.panel.names), rotation=90, fontsize=6)
    ax.axhline(0, color="black", lw=0.5)
    ax.set(title="Residuals")
    _style(ax)
    return _savefig(fig, path)


def bic_plot(alpha_path: AlphaPath, path: PathLike) -> Path:
    """BIC against α on a log axis with the selected α marked."""
    fig, ax = plt.subplots(figsize=(SIZE * 1.4, SIZE))
    ax.plot(
        alpha_path.alphas, alpha_path.bic, marker=".", color="tab:blue", label="BIC"
    )
    ax.axvline(alpha_path.alpha_opt, color="tab:orange", ls="--", label="selected")
    ax.set_xscale("log")
    ax.set(title="BIC over the alpha grid", xlabel="alpha", ylabel="BIC")
    _style(ax)
    ax.legend(frameon=True, loc="upper left")
    return _savefig(fig, path)


def em_convergence_plot(fit: FitResult, path: PathLike) -> Path:
    if fit.em_log is None:
        raise ModelError("fit has no EM log")
    it = np.arange(1, fit.em_log.iterations + 1)
    fig, ax = plt.subplots(figsize=(SIZE * 1.4, SIZE))
    ax.plot(it, fit.em_log.logliks, marker=".", color="tab:blue", label="loglik")
    if fit.alpha is not None:
        ax.plot(it, fit.em_log.penalized, color="tab:orange", label="penalised")
    ax.set(title="EM log-likelihood", xlabel="iteration")
    _style(ax)
    ax.legend(frameon=True, loc="lower right")
    return _savefig(fig, path)


def ic_plot(table: IcTable, path: PathLike) -> Path:
    """Scree bars of variance shares next to the three criteria."""
    fig, (left, right) = plt.subplots(1, 2, figsize=(SIZE * 16 / 7.3, SIZE))
    k = len(table.r)
    left.bar(table.r, table.shares[:k], color="tab:blue")
    left.set(title="Variance explained", xlabel="eigenvalue")
    _style(left)
    for name, values in (("IC1", table.ic1), ("IC2", table.ic2), ("IC3", table.ic3)):
        right.plot(table.r, values, marker=".", label=name)
    right.axvline(table.best, color="black", lw=0.5, ls="--")
    right.set(title="Information criteria", xlabel="r")
    _style(right)
    right.legend(frameon=True, loc="upper right")
    return _savefig(fig, path)


def missing_data_plot(
    panel: TimePanel, path: PathLike, labels: Optional[bool] = None
) -> Path:
    """Observed cells dark, missing cells light; time runs down the rows."""
    labels = panel.p <= 60 if labels is None else labels
    fig, ax = plt.subplots(figsize=(2 + 0.15 * panel.p, SIZE))
    ax.imshow(
        panel.mask, aspect="auto", cmap="Greys", vmin=0, vmax=1, interpolation="nearest"
    )
    if labels:
        ax.set_xticks(range(panel.p), list(panel.names), rotation=90, fontsize=6)
    ax.set(title="Observed data", ylabel="t")
    return _savefig(fig, path)

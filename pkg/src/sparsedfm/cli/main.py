# src/sparsedfm/cli/main.py
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import click
import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.progress import Progress
from rich.table import Table

from ..config.manager import ConfigManager
from ..config.options import ALG_SPECS, Alg, ErrorModel, FitConfig, KalmanEngine
from ..data.panel import (
    TimePanel,
    load_csv,
    matrix_frame,
    read_column_labels,
    read_column_spec,
    write_csv,
)
from ..data.transforms import missing_summary, transform_data
from ..errors import DataError, ModelError, NumericalError, SparseDfmError, TuningError
from ..estimators.result import FitResult
from ..model.api import predict_h, sparse_dfm_fit, summary
from ..nowcast.harness import HarnessConfig, run_harness
from ..statespace.simulate import block_sparse_loadings, make_rng, simulate_dfm
from ..tuning.alpha import logspace
from ..tuning.factors import tune_factors
from ..utils import plots

console = Console()
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

EXIT_CODES = {
    DataError: EXIT_DATA,
    NumericalError: EXIT_NUMERICAL,
    ModelError: EXIT_USAGE,
    TuningError: EXIT_USAGE,
}


def exit_code_for(error: SparseDfmError) -> int:
    for kind, code in EXIT_CODES.items():
        if isinstance(error, kind):
            return code
    return EXIT_USAGE


class DfmGroup(click.Group):
    """Click group that turns library errors into the documented exit codes"""

    def main(self, args=None, prog_name=None, **extra):
        extra.pop("standalone_mode", None)
        try:
            rv = super().main(
                args=args, prog_name=prog_name, standalone_mode=False, **extra
            )
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.Abort:
            console.print("\nOperation cancelled", style="yellow")
            sys.exit(EXIT_USAGE)
        except SparseDfmError as e:
            console.print(f"Error: {escape(str(e))}", style="bold red")
            sys.exit(exit_code_for(e))
        except np.linalg.LinAlgError as e:
            console.print(f"Error: {escape(str(e))}", style="bold red")
            sys.exit(EXIT_NUMERICAL)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


def setup_logging(verbose: int):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def parse_alphas(text: str) -> Tuple[float, ...]:
    """``lo:hi:count`` exponents for a log grid, or comma-separated values"""
    try:
        if ":" in text:
            lo, hi, count = text.split(":")
            return tuple(float(a) for a in logspace(float(lo), float(hi), int(count)))
        return tuple(float(a) for a in text.split(","))
    except ValueError:
        raise click.BadParameter(
            f"expected 'lo:hi:count' or numbers, got {text!r}", param_hint="--alphas"
        )


def parse_setting(key: str, value: str):
    if key == "alphas":
        return list(parse_alphas(value))
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value


def input_options(func):
    func = click.option(
        "--has-index/--no-index",
        default=False,
        help="Treat the first CSV column as time labels",
    )(func)
    func = click.option(
        "--input",
        "-i",
        "input_path",
        required=True,
        type=click.Path(dir_okay=False, path_type=Path),
        help="Panel CSV with a header row",
    )(func)
    return func


def outdir_option(func):
    return click.option(
        "--outdir",
        "-o",
        default=".",
        type=click.Path(file_okay=False, path_type=Path),
        help="Directory for output files",
    )(func)


def fit_options(func):
    """Every FitConfig field as a flag; unset flags take the configured defaults"""
    options = [
        click.option("--r", "r", type=int, help="Number of factors"),
        click.option("--q", type=int, help="Leading series left unpenalised"),
        click.option("--alphas", help="Penalty grid 'lo:hi:count' or value list"),
        click.option(
            "--alg", type=click.Choice([a.value for a in Alg]), help="Estimator"
        ),
        click.option(
            "--err",
            type=click.Choice([e.value for e in ErrorModel]),
            help="Idiosyncratic error model",
        ),
        click.option(
            "--kalman",
            type=click.Choice([k.value for k in KalmanEngine]),
            help="Kalman filter/smoother engine",
        ),
        click.option("--max-iter", type=int, help="Maximum EM iterations"),
        click.option("--threshold", type=float, help="EM convergence threshold"),
        click.option(
            "--standardize/--no-standardize",
            default=None,
            help="Fit on z-scored columns",
        ),
        click.option(
            "--store-all-alphas/--best-alpha-only",
            default=None,
            help="Keep the fit at every grid point",
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def build_config(overrides: Dict) -> FitConfig:
    """Configured defaults with command-line overrides on top"""
    data = ConfigManager().fit_defaults()
    flags = dict(overrides)
    engine = flags.pop("kalman", None)
    if engine is not None:
        flags["engine"] = engine
    if flags.get("alphas") is not None:
        flags["alphas"] = parse_alphas(flags["alphas"])
    data.update({k: v for k, v in flags.items() if v is not None})
    return FitConfig.from_dict(data)


def _fit_flags(kwargs: Dict) -> Dict:
    keys = (
        "r",
        "q",
        "alphas",
        "alg",
        "err",
        "kalman",
        "max_iter",
        "threshold",
        "standardize",
        "store_all_alphas",
    )
    return {k: kwargs.pop(k) for k in keys if k in kwargs}


def _require_r(config: FitConfig):
    if config.r is None:
        raise click.UsageError("Missing option '--r' (number of factors)")


def _write(frame, outdir: Path, name: str, index: bool = False) -> Path:
    path = write_csv(frame, outdir / name, index=index)
    logger.info("Wrote %s", path)
    return path


def write_fit(fit: FitResult, outdir: Path, dump_kfs: bool = False) -> List[Path]:
    """Write the parameter, state and diagnostic CSVs of a fit"""
    names = list(fit.panel.names)
    factors = [f"F{j + 1}" for j in range(fit.r)]
    index = list(fit.panel.index)
    params = fit.params
    written = [
        _write(matrix_frame(fit.factors, factors, index), outdir, "factors.csv", True),
        _write(
            matrix_frame(params.Lambda, factors, names), outdir, "loadings.csv", True
        ),
        _write(matrix_frame(params.A, factors), outdir, "A.csv"),
        _write(matrix_frame(params.Sigma_u, factors), outdir, "sigma_u.csv"),
        _write(matrix_frame(params.sigma_eps[None], names), outdir, "sigma_eps.csv"),
        _write(
            matrix_frame(fit.fitted_unscaled, names, index), outdir, "fitted.csv", True
        ),
        _write(
            matrix_frame(fit.residuals_scaled, names, index),
            outdir,
            "residuals.csv",
            True,
        ),
    ]
    if fit.ar1 is not None:
        for label, values in (("phi", fit.ar1.phi), ("sigma_e", fit.ar1.sigma_e)):
            frame = matrix_frame(values[None], names)
            written.append(_write(frame, outdir, f"{label}.csv"))
    if fit.em_log is not None:
        log = fit.em_log
        emlog = matrix_frame(
            np.column_stack(
                [
                    np.arange(1, log.iterations + 1),
                    log.logliks,
                    log.m_values,
                    log.penalized,
                ]
            ),
            ["iteration", "loglik", "M", "penalized"],
        )
        written.append(_write(emlog, outdir, "emlog.csv"))
    if fit.alpha_path is not None:
        written.append(_write(fit.alpha_path.to_frame(), outdir, "alpha_path.csv"))
    if dump_kfs and fit.kfs is not None:
        for name, frame in fit.kfs.to_frames().items():
            written.append(_write(frame, outdir, f"{name}.csv"))
    return written


def write_fit_plots(
    fit: FitResult, outdir: Path, groups: Optional[List[str]] = None
) -> List[Path]:
    written = [
        plots.loading_heatmap(fit, outdir / "loadings.svg"),
        plots.residual_boxplot(fit, outdir / "residuals.svg"),
    ]
    for j in range(fit.r):
        written.append(plots.factor_plot(fit, outdir / f"factor{j + 1}.svg", j))
        written.append(plots.loading_lineplot(fit, outdir / f"loading{j + 1}.svg", j))
        if groups is not None:
            written.append(
                plots.loading_grouplineplot(
                    fit, outdir / f"loading_groups{j + 1}.svg", groups, j
                )
            )
    if fit.em_log is not None:
        written.append(plots.em_convergence_plot(fit, outdir / "emlog.svg"))
    if fit.alpha_path is not None:
        written.append(plots.bic_plot(fit.alpha_path, outdir / "bic.svg"))
    return written


def show_summary(fit: FitResult):
    info = summary(fit)
    table = Table(title="Fit summary")
    table.add_column("Setting", style="cyan")
    table.add_column("Value", style="green")
    for key, value in info.items():
        if key in ("A", "Sigma_u"):
            continue
        table.add_row(key, str(value))
    console.print(table)

    a_table = Table(title="Transition matrix A")
    for j in range(fit.r):
        a_table.add_column(f"F{j + 1}", style="yellow")
    for row in fit.params.A:
        a_table.add_row(*(f"{v:.4f}" for v in row))
    console.print(a_table)


def _fit_panel(input_path: Path, has_index: bool, flags: Dict) -> FitResult:
    config = build_config(flags)
    _require_r(config)
    panel = load_csv(input_path, has_index=has_index)
    return sparse_dfm_fit(panel, config)


@click.group(cls=DfmGroup)
@click.option("-v", "--verbose", count=True, help="-v for progress, -vv for debug")
@click.version_option(package_name="sparsedfm")
def cli(verbose):
    """sparsedfm - sparse dynamic factor models on the command line"""
    setup_logging(verbose)


@cli.command()
@input_options
@outdir_option
@click.option(
    "--codes",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="CSV: column names, then one row of transform codes 1-7",
)
def transform(input_path, has_index, outdir, codes):
    """Apply stationarity transforms column by column"""
    panel = load_csv(input_path, has_index=has_index)
    code_list = read_column_spec(codes, panel.names, "transform code")
    out = transform_data(panel, code_list)
    path = _write(out, outdir, "transformed.csv")
    console.print(f"✨ Wrote {path}", style="bold green")


@cli.command()
@input_options
@outdir_option
@click.option("--plot", is_flag=True, help="Also write missing.svg")
def missing(input_path, has_index, outdir, plot):
    """Summarise where the panel has gaps"""
    panel = load_csv(input_path, has_index=has_index)
    frame = missing_summary(panel)
    _write(frame, outdir, "missing_summary.csv")
    table = Table(title="Missing data")
    for column in frame.columns:
        table.add_column(column, style="cyan" if column == "column" else "green")
    for row in frame.itertuples(index=False):
        table.add_row(*(str(v) for v in row))
    console.print(table)
    if plot:
        plots.missing_data_plot(panel, outdir / "missing.svg")


@cli.command("tune-factors")
@input_options
@outdir_option
@click.option("--r-max", type=int, help="Largest r to try (default min(15, p-1))")
@click.option(
    "--ic-type", type=click.Choice(["1", "2", "3"]), default="2", help="Criterion"
)
@click.option("--no-standardize", is_flag=True, help="Skip z-scoring")
@click.option("--plot", is_flag=True, help="Also write ic.svg")
def tune_factors_cmd(
    input_path, has_index, outdir, r_max, ic_type, no_standardize, plot
):
    """Choose the number of factors with the Bai-Ng criteria"""
    panel = load_csv(input_path, has_index=has_index)
    table = tune_factors(panel, r_max, int(ic_type), not no_standardize)
    _write(table.to_frame(), outdir, "ic_table.csv")
    if plot:
        plots.ic_plot(table, outdir / "ic.svg")

    view = Table(title="Information criteria")
    for column in ("r", "V", "IC1", "IC2", "IC3", "share"):
        view.add_column(column, style="cyan" if column == "r" else "green")
    for row in table.to_frame().itertuples(index=False):
        view.add_row(
            str(int(row.r)),
            *(f"{v:.5f}" for v in (row.V, row.IC1, row.IC2, row.IC3, row.share)),
        )
    console.print(view)
    console.print(f"IC{ic_type} selects r = {table.best}", style="bold green")


@cli.command()
@input_options
@outdir_option
@fit_options
@click.option("--plot", is_flag=True, help="Also write SVG figures")
@click.option("--dump-kfs", is_flag=True, help="Also write Kalman smoother output")
@click.option(
    "--groups",
    type=click.Path(dir_okay=False, path_type=Path),
    help="CSV of group labels per column; adds grouped loading plots",
)
def fit(input_path, has_index, outdir, plot, dump_kfs, groups, **kwargs):
    """Estimate the model and write parameters, factors and diagnostics"""
    result = _fit_panel(input_path, has_index, _fit_flags(kwargs))
    labels = None
    if groups is not None:
        labels = read_column_labels(groups, result.panel.names, "group")
    written = write_fit(result, outdir, dump_kfs)
    if plot:
        written.extend(write_fit_plots(result, outdir, labels))
    show_summary(result)
    console.print(f"✨ Wrote {len(written)} files to {outdir}", style="bold green")


@cli.command()
@input_options
@outdir_option
@fit_options
@click.option("--h", "h", type=int, default=1, show_default=True, help="Horizon")
def predict(input_path, has_index, outdir, h, **kwargs):
    """Fit, then forecast h steps past the end of the sample"""
    result = _fit_panel(input_path, has_index, _fit_flags(kwargs))
    forecast = predict_h(result, h)
    frames = forecast.to_frames()
    _write(frames["forecast_series"], outdir, "forecasts.csv")
    _write(frames["forecast_factors"], outdir, "forecast_factors.csv")
    _write(frames["forecast_variance"], outdir, "forecast_variance.csv")
    console.print(
        f"✨ Wrote {h}-step forecasts to {outdir / 'forecasts.csv'}",
        style="bold green",
    )


@cli.command()
@outdir_option
@click.option("--n", "n", type=int, default=100, show_default=True)
@click.option("--p", "p", type=int, default=20, show_default=True)
@click.option("--r", "r", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--missing", "missing_frac", type=float, default=0.0, show_default=True)
@click.option("--sparse", is_flag=True, help="Block-sparse true loadings")
@click.option("--phi", type=float, help="AR(1) coefficient of the idiosyncratic errors")
def simulate(outdir, n, p, r, seed, missing_frac, sparse, phi):
    """Simulate a panel and write it with its true parameters"""
    loadings = None
    if sparse:
        # loadings draw from their own stream
        loadings = block_sparse_loadings(p, r, make_rng(seed + 1))
    sim = simulate_dfm(
        n, p, r, seed=seed, missing_frac=missing_frac, loadings=loadings, phi=phi
    )
    names = list(sim.panel.names)
    factors = [f"F{j + 1}" for j in range(r)]
    _write(sim.panel, outdir, "panel.csv")
    true_loadings = matrix_frame(sim.params.Lambda, factors, names)
    _write(true_loadings, outdir, "true_loadings.csv", True)
    _write(matrix_frame(sim.params.A, factors), outdir, "true_A.csv")
    _write(matrix_frame(sim.params.Sigma_u, factors), outdir, "true_sigma_u.csv")
    sigma = sim.ar1.sigma_e if sim.ar1 is not None else sim.params.sigma_eps
    _write(matrix_frame(sigma[None], names), outdir, "true_sigma_eps.csv")
    _write(matrix_frame(sim.factors, factors), outdir, "true_factors.csv")
    console.print(f"✨ Simulated {n} x {p} panel in {outdir}", style="bold green")


def _resolve_targets(text: str, panel: TimePanel) -> Tuple[int, ...]:
    targets = []
    for token in (t.strip() for t in text.split(",")):
        if token in panel.names:
            targets.append(panel.column_index(token))
        elif token.isdigit():
            targets.append(int(token) - 1)
        else:
            raise DataError(f"unknown target column '{token}'")
    return tuple(targets)


@cli.command()
@input_options
@outdir_option
@fit_options
@click.option("--targets", required=True, help="Target columns, names or 1-based")
@click.option(
    "--lags",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="CSV of publication lags per column",
)
@click.option(
    "--codes",
    type=click.Path(dir_okay=False, path_type=Path),
    help="CSV of transform codes per column (default: all 1)",
)
@click.option("--start", type=int, required=True, help="First window end (rows)")
@click.option("--end", type=int, help="Last window end (default: all rows)")
@click.option(
    "--compare",
    default="EM,EM-sparse",
    show_default=True,
    help="Algorithms to evaluate",
)
@click.option("--reuse-params", is_flag=True, help="Fit once, then only re-smooth")
def nowcast(
    input_path,
    has_index,
    outdir,
    targets,
    lags,
    codes,
    start,
    end,
    compare,
    reuse_params,
    **kwargs,
):
    """Pseudo real-time nowcast evaluation over expanding windows"""
    base = build_config(_fit_flags(kwargs))
    _require_r(base)
    panel = load_csv(input_path, has_index=has_index)
    lag_list = read_column_spec(lags, panel.names, "lag")
    code_list = (
        read_column_spec(codes, panel.names, "transform code")
        if codes is not None
        else [1] * panel.p
    )
    models = {}
    for name in (c.strip() for c in compare.split(",")):
        try:
            models[name] = base.replace(alg=Alg(name))
        except ValueError:
            raise click.BadParameter(
                f"unknown algorithm '{name}'; choose from "
                + ", ".join(spec.name for spec in ALG_SPECS.values()),
                param_hint="--compare",
            )
    config = HarnessConfig(
        targets=_resolve_targets(targets, panel),
        lags=tuple(lag_list),
        codes=tuple(code_list),
        start=start,
        end=end or panel.n,
        models=models,
        reuse_params=reuse_params,
    )
    with Progress(console=console, transient=True) as progress:
        task = progress.add_task("Nowcasting", total=len(config.windows))
        report = run_harness(
            panel, config, progress=lambda _: progress.advance(task)
        )
    _write(report.to_frame(), outdir, "nowcast_errors.csv")
    table_frame = report.summary()
    _write(table_frame, outdir, "nowcast_summary.csv")

    table = Table(title="Nowcast absolute errors")
    for column in table_frame.columns:
        table.add_column(str(column), style="cyan" if column == "model" else "green")
    for row in table_frame.itertuples(index=False):
        table.add_row(
            *(f"{v:.4f}" if isinstance(v, float) else str(v) for v in row)
        )
    console.print(table)
    for (window, model), message in sorted(report.failures.items()):
        console.print(
            f"Window {window} ({model}) failed: {escape(message)}", style="yellow"
        )


@cli.group()
def config():
    """Show or change the default fit settings"""


@config.command("show")
def config_show():
    """Print the effective defaults as JSON"""
    click.echo(json.dumps(ConfigManager().fit_defaults(), indent=2))


@config.command("set")
@click.argument("key")
@click.argument("value")
def config_set(key, value):
    """Pin a default, e.g. `config set engine multivariate`"""
    ConfigManager().set_default(key, parse_setting(key, value))
    console.print(f"✨ Default {key} updated", style="bold green")


@config.command("reset")
@click.option("--yes", is_flag=True, help="Do not ask for confirmation")
def config_reset(yes):
    """Forget all pinned defaults"""
    if yes or click.confirm("Are you sure you want to reset all configuration?"):
        ConfigManager().reset_all()
        console.print("✨ All configuration reset successfully.", style="bold green")


def main(argv: Optional[List[str]] = None):
    """Main entry point for the CLI"""
    try:
        cli.main(args=argv, prog_name="sparsedfm")
    except KeyboardInterrupt:
        console.print("\n\nOperation cancelled by user", style="yellow")
        sys.exit(EXIT_USAGE)


if __name__ == "__main__":
    main()

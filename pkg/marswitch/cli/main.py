import functools
import traceback
import warnings
from pathlib import Path
from dataclasses import replace

import click
import numpy as np

from marswitch.config import DEBUG
from marswitch.config import get_setting
from marswitch.tensor import MatrixSeries
from marswitch.tensor import standardize_series
from marswitch.models import simulate_path
from marswitch.models import DEFAULT_BURN_IN
from marswitch.models import attach_transition
from marswitch.models import check_stationarity
from marswitch.models import one_step_forecast
from marswitch.runner import summarize
from marswitch.runner import run_monte_carlo
from marswitch.run_config import build_model
from marswitch.run_config import build_grids
from marswitch.run_config import build_source
from marswitch.run_config import load_run_config
from marswitch.run_config import build_mc_config
from marswitch.run_config import build_ils_options
from marswitch.linearity import lm_test_tr2
from marswitch.linearity import lm_test_score
from marswitch.linearity import rank_diagnostics
from marswitch.estimation import estimate_mar
from marswitch.estimation import estimate_mtar
from marswitch.estimation import estimate_mstar
from marswitch.estimation import coefficient_inference
from marswitch.exceptions import MarswitchError
from marswitch.results import read_fit
from marswitch.results import write_fit
from marswitch.results import write_mc
from marswitch.results import read_series
from marswitch.results import write_series
from marswitch.results import write_summary
from marswitch.results import atomic_write_text
from marswitch.results.fits import dump_json
from marswitch.results.fits import fit_to_dict
from marswitch.utils.terminal_output import RED
from marswitch.utils.terminal_output import colorify
from marswitch.utils.terminal_output import print_normalize
from marswitch.utils.terminal_output import TerminalOutput
from marswitch.utils.checkers import check_random_state


main = click.Group(
    name='Main commands',
    help="Main commands that are used in ``marswitch``."
)

REPORT_SCHEMA_VERSION = 1
IO_EXIT_CODE = 4


def _exit_on_error(func):
    """Map the errors of a command to the exit codes of ``MarswitchError``.

    Other exceptions exit with code 1. With the ``debug`` setting on, the
    errors are re-raised. Usage errors are left to click, which exits with
    code 2 as for a model validity error but prints a ``Usage:`` line
    instead of ``ERROR:``.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (click.ClickException, click.exceptions.Exit, SystemExit):
            raise
        except Exception as e:
            if DEBUG:
                raise
            if isinstance(e, MarswitchError):
                exit_code = e.exit_code
            elif isinstance(e, OSError):
                exit_code = IO_EXIT_CODE
            else:
                exit_code = 1
                print(traceback.format_exc())
            print_normalize(colorify(f"ERROR: {e}", RED))
            raise SystemExit(exit_code)
    return wrapper


def run_options(func):
    "Options shared by every command."
    options = [
        click.option('--config', 'config_file', default=None,
                     type=click.Path(exists=True, dir_okay=False),
                     help="YAML run configuration."),
        click.option('--set', 'overrides', metavar='<section.key=value>',
                     multiple=True, type=str,
                     help="Override a key of the run configuration, after "
                     "the file is parsed. Can be repeated, the last one "
                     "wins."),
        click.option('--out', 'out_dir', default=None,
                     type=click.Path(file_okay=False),
                     help="Output directory. Defaults to the ``output_dir`` "
                     "setting (MARSWITCH_OUTPUT_DIR)."),
        click.option('--seed', default=None, type=int,
                     help="Seed of the command, overrides the seeds of the "
                     "run configuration."),
        click.option('--quiet/--verbose', 'quiet', default=False,
                     help="Silence the progress and report lines."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _get_out_dir(out_dir):
    out_dir = Path(out_dir or get_setting('output_dir'))
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def _series_path(config, path=None):
    path = path or config['series']['path']
    if path is None:
        raise click.BadParameter(
            "No series given: use the SERIES argument or series.path."
        )
    return path


def _load_series(config, path=None, need_transition=None):
    """Read the series of a command and attach its transition variable."""
    series = read_series(_series_path(config, path))
    if config['series']['standardize']:
        series = standardize_series(series)
    if need_transition is None:
        need_transition = config['model']['kind'] != 'mar'
    if need_transition:
        series = attach_transition(series, build_source(config))
    return series


def _seed_overrides(seed, keys):
    if seed is None:
        return []
    return [f"{key}={seed}" for key in keys]


@main.command(
    help="Simulate a series from the model of the run configuration.",
    epilog="Writes series.csv and manifest.json in the output directory."
)
@run_options
@click.option('--allow-nonstationary', is_flag=True,
              help="Simulate even if a regime violates the stationarity "
              "condition.")
@_exit_on_error
def simulate(config_file=None, overrides=(), out_dir=None, seed=None,
             quiet=False, allow_nonstationary=False):
    overrides = list(overrides) + _seed_overrides(seed, ['simulate.seed'])
    config = load_run_config(config_file, overrides)
    terminal = TerminalOutput(verbose=not quiet)
    terminal.set(task="simulate")

    model = build_model(config)
    sim = config['simulate']
    allow = allow_nonstationary or sim['allow_nonstationary']
    rng = check_random_state(sim['seed'])
    transition = None
    if model.source.kind == 'exogenous':
        # Exogenous transitions are i.i.d. U(0, 1) draws.
        burn_in = sim['burn_in']
        if burn_in is None:
            burn_in = DEFAULT_BURN_IN
        transition = rng.uniform(size=burn_in + sim['T'])
    series = simulate_path(
        model, sim['T'], burn_in=sim['burn_in'], seed=rng,
        y0=sim['y0'], transition=transition, allow_nonstationary=allow,
    )

    out_dir = _get_out_dir(out_dir)
    series_path = write_series(series, out_dir / 'series.csv')
    stationary, radii = check_stationarity(model)
    doc = model_manifest(model)
    doc.update(
        seed=sim['seed'], T=sim['T'], burn_in=series.metadata['burn_in'],
        stationary=stationary, radii=radii, series=series_path.name,
    )
    manifest_path = dump_json(doc, out_dir / 'manifest.json')
    terminal.savefile_status(series_path)
    terminal.savefile_status(manifest_path)


def model_manifest(model):
    "Manifest of the true parameters of a data generating process."
    coefs = {}
    for names, regime in zip(['AB', 'CD'], model.regimes):
        coefs[names[0]], coefs[names[1]] = regime.left, regime.right
    tf = model.transition
    return {
        'schema_version': REPORT_SCHEMA_VERSION,
        'kind': model.kind,
        'dims': list(model.dims),
        'coefficients': coefs,
        'transition': None if tf is None else {
            'kind': tf.kind, 'c': tf.c, 'gamma': tf.gamma
        },
        'transition_source': model.source.to_dict(),
        'noise': {'sigma_r': model.noise.sigma_r,
                  'sigma_c': model.noise.sigma_c},
    }


def format_report(fit):
    "Human readable report of a fit."
    doc = fit_to_dict(fit)
    lines = [f"Model: {doc['kind'].upper()} {tuple(doc['dims'])}"]
    if doc['transition'] is not None:
        t = doc['transition']
        lines.append(f"Threshold c: {t['c']:.6g}")
        if t['gamma'] is not None:
            lines.append(f"Slope gamma: {t['gamma']:.6g}")
    lines.append(f"SSQ: {doc['ssq']!r}")
    lines.append(f"Sweeps: {doc['sweeps_used']} "
                 f"(converged: {doc['converged']})")
    lines.append(f"Parameters: {doc['n_params']}")
    pvalues = doc['pvalues'] or {}
    with np.printoptions(precision=4, suppress=True):
        for name, M in doc['coefficients'].items():
            lines.append(f"{name} =\n{np.asarray(M)}")
            if pvalues.get(name) is not None:
                P = np.array(pvalues[name], dtype=float)
                lines.append(f"p-values({name}) =\n{P}")
    return "\n".join(lines) + "\n"


@main.command(
    help="Estimate a MAR, MTAR or MSTAR model on a series file.",
    epilog="Writes fit.json and report.txt in the output directory."
)
@click.argument('series_path', metavar='SERIES', required=False,
                type=click.Path(exists=True, dir_okay=False))
@run_options
@click.option('--model', 'kind', default=None,
              type=click.Choice(['mar', 'mtar', 'mstar']),
              help="Model kind, overrides model.kind.")
@click.option('--standardize/--no-standardize', default=None,
              help="Standardize every entry series before estimating. "
              "Defaults to series.standardize.")
@_exit_on_error
def estimate(series_path=None, config_file=None, overrides=(), out_dir=None,
             seed=None, quiet=False, kind=None, standardize=None):
    overrides = list(overrides) + _seed_overrides(seed, ['estimation.seed'])
    if standardize is not None:
        overrides.append(f"series.standardize={str(standardize).lower()}")
    config = load_run_config(config_file, overrides, kind=kind)
    terminal = TerminalOutput(verbose=not quiet)
    kind = config['model']['kind']
    terminal.set(task=f"estimate {kind}")

    series = _load_series(config, series_path)
    opts = build_ils_options(config)
    threshold_grid, slope_grid = build_grids(config)
    out_dir = _get_out_dir(out_dir)
    try:
        if kind == 'mar':
            fit = estimate_mar(series, opts, terminal)
        elif kind == 'mtar':
            fit = estimate_mtar(series, threshold_grid, opts, terminal)
        else:
            fit = estimate_mstar(series, slope_grid, opts, terminal)
    except MarswitchError as e:
        grid_profile = getattr(e, 'grid_profile', None)
        if grid_profile is not None:
            path = dump_json(
                {'schema_version': REPORT_SCHEMA_VERSION, 'kind': kind,
                 'status': 'error', 'error': str(e),
                 'grid_profile': grid_profile},
                out_dir / 'fit_error.json'
            )
            terminal.savefile_status(path)
        raise

    source = build_source(config)
    fit = replace(fit, model=fit.model.replace(source=source),
                  transition_source=source)
    fit.diagnostics['standardized'] = bool(config['series']['standardize'])
    if config['estimation']['inference']:
        fit.pvalues = coefficient_inference(fit, series)

    fit_path = write_fit(fit, out_dir / 'fit.json')
    report = format_report(fit)
    report_path = atomic_write_text(out_dir / 'report.txt', report)
    terminal.info(report)
    terminal.show_status('done' if fit.converged else 'max_runs')
    terminal.savefile_status(fit_path)
    terminal.savefile_status(report_path)


@main.command(
    help="Lagrange multiplier linearity test of a series, in its score and "
    "TR² forms.",
    epilog="Writes lmtest.json in the output directory."
)
@click.argument('series_path', metavar='SERIES', required=False,
                type=click.Path(exists=True, dir_okay=False))
@run_options
@click.option('--order', '-K', 'K', default=None, type=int,
              help="Order K of the Taylor expansion. Defaults to lmtest.K.")
@_exit_on_error
def lmtest(series_path=None, config_file=None, overrides=(), out_dir=None,
           seed=None, quiet=False, K=None):
    if K is not None:
        overrides = list(overrides) + [f"lmtest.K={K}"]
    config = load_run_config(config_file, overrides)
    K = config['lmtest']['K']
    if not isinstance(K, int) or K < 1:
        raise click.BadParameter(f"K should be an integer >= 1. Got {K!r}.")
    terminal = TerminalOutput(verbose=not quiet)
    terminal.set(task="lmtest")

    series = _load_series(config, series_path, need_transition=True)
    diagnostics = rank_diagnostics(series, K)
    terminal.info(
        f"Rank diagnostics: rank {diagnostics['rank']} / "
        f"{diagnostics['n_regressors']} regressors, "
        f"eigenvalue ratios {diagnostics['x_eig_ratio']:.3e} (X'X) and "
        f"{diagnostics['z_eig_ratio']:.3e} (Z'(I - P_X)Z)."
    )
    results = {'score': lm_test_score(series, K),
               'tr2': lm_test_tr2(series, K)}
    for form, res in results.items():
        terminal.info(
            f"LM {form}: statistic = {res.statistic:.6g}, dof = {res.dof}, "
            f"p-value = {res.p_value:.4g}"
        )

    out_dir = _get_out_dir(out_dir)
    path = dump_json({
        'schema_version': REPORT_SCHEMA_VERSION, 'K': K,
        **{form: res.to_dict() for form, res in results.items()},
        'diagnostics': diagnostics,
    }, out_dir / 'lmtest.json')
    terminal.savefile_status(path)


@main.command(
    help="Run a Monte Carlo experiment comparing the estimators.",
    epilog="Writes mc_results.csv (or .parquet) and mc_summary.json in the "
    "output directory."
)
@run_options
@click.option('--n-jobs', '-j', 'n_jobs', default=None, type=int,
              help="Number of replications run in parallel. Defaults to "
              "mc.n_jobs.")
@_exit_on_error
def mc(config_file=None, overrides=(), out_dir=None, seed=None, quiet=False,
       n_jobs=None):
    overrides = list(overrides) + _seed_overrides(seed, ['mc.base_seed'])
    if n_jobs is not None:
        overrides.append(f"mc.n_jobs={n_jobs}")
    config = load_run_config(config_file, overrides)
    if config['mc']['format'] not in ('csv', 'parquet'):
        raise click.BadParameter(
            f"mc.format should be csv or parquet. Got "
            f"{config['mc']['format']!r}."
        )
    cfg = build_mc_config(config)
    terminal = TerminalOutput(verbose=not quiet)

    rows = run_monte_carlo(cfg, terminal)
    summary = summarize(rows, c_true=cfg.c_true, gamma_true=cfg.gamma_true)

    out_dir = _get_out_dir(out_dir)
    fmt = config['mc']['format']
    rows_path = write_mc(rows, out_dir / f"mc_results.{fmt}")
    summary_path = write_summary(summary, out_dir / 'mc_summary.json')
    terminal.savefile_status(rows_path)
    terminal.savefile_status(summary_path)


@main.command(
    help="One-step conditional mean forecast from a fit file.",
    epilog="Writes forecast.csv in the output directory."
)
@click.argument('series_path', metavar='SERIES', required=False,
                type=click.Path(exists=True, dir_okay=False))
@run_options
@click.option('--fit', 'fit_path', default=None,
              type=click.Path(dir_okay=False),
              help="Fit file written by `marswitch estimate`. Defaults to "
              "forecast.fit.")
@_exit_on_error
def forecast(series_path=None, config_file=None, overrides=(), out_dir=None,
             seed=None, quiet=False, fit_path=None):
    config = load_run_config(config_file, overrides)
    series_path = _series_path(config, series_path)
    fit_path = fit_path or config['forecast']['fit']
    if fit_path is None or not Path(fit_path).exists():
        raise click.BadParameter(
            f"No fit file found at {fit_path}. Use --fit or forecast.fit."
        )
    terminal = TerminalOutput(verbose=not quiet)
    terminal.set(task="forecast")

    fit = read_fit(fit_path)
    model = fit.model
    series = read_series(series_path)
    if fit.diagnostics.get('standardized'):
        warnings.warn(
            "The model was fitted on standardized series: the forecast is "
            "in standardized units."
        )
        series = standardize_series(series)

    s_next = config['forecast']['s_next']
    if model.kind != 'mar' and s_next is None:
        source = fit.transition_source or model.source
        if source.kind == 'trend':
            warnings.warn(
                "With a trend transition, s_(T+1) = (T+1)/T extrapolates "
                "beyond the observed support of s_t."
            )
        s_next = source.next_value(series)

    Y_next = one_step_forecast(model, series, s_next)
    out_dir = _get_out_dir(out_dir)
    path = write_series(
        MatrixSeries(Y_next, row_labels=series.row_labels,
                     col_labels=series.col_labels),
        out_dir / 'forecast.csv'
    )
    terminal.savefile_status(path)

"""Monte Carlo replications comparing the estimators on simulated data."""
import time
import warnings
from dataclasses import dataclass, field, asdict

import numpy as np
import pandas as pd
from scipy import stats

from .models import ModelSpec
from .models import simulate_path
from .models import check_stationarity
from .models import DEFAULT_BURN_IN
from .baselines import estimate_var
from .baselines import estimate_vtar
from .baselines import estimate_vlstar
from .estimation import IlsOptions
from .estimation import ThresholdGrid
from .estimation import SlopeThresholdGrid
from .estimation import estimate_mar
from .estimation import estimate_mtar
from .estimation import estimate_mstar
from .exceptions import ModelValidityError
from .utils.checkers import check_random_state
from .utils.checkers import check_positive_int
from .utils.status_handler import exception_handler
from .utils.terminal_output import TerminalOutput
from .parallel_backends import parallel_run
from .parallel_backends import check_parallel_config


FAILURE_STATUS = ['diverged', 'error', 'interrupted']
SUCCESS_STATUS = ['done', 'max_runs']

ESTIMATORS = ('mar', 'mtar', 'mstar', 'var', 'vtar', 'vlstar')
DEFAULT_ESTIMATORS = {
    'mar': ('mar', 'var'),
    'mtar': ('mtar', 'vtar'),
    'mstar': ('mstar', 'vlstar'),
}

SUMMARY_SCHEMA_VERSION = 1


@dataclass
class McConfig:
    """Setting of a Monte Carlo experiment.

    Parameters
    ----------
    dgp : ModelSpec
        Data generating process, with its true parameters.
    T : int
        Length of each simulated path.
    replications : int
        Number of replications ``R``.
    estimators : tuple of str | None
        Estimators run on each path, among ``ESTIMATORS``. Defaults to the
        structured estimator of the DGP kind and its vectorized baseline.
    threshold_grid : ThresholdGrid | None
        Grid of the MTAR and VTAR estimators.
    slope_grid : SlopeThresholdGrid | None
        Grid of the MSTAR and VLSTAR estimators.
    ils : IlsOptions | None
        Options of the structured estimators.
    base_seed : int
        Replication ``r`` uses the seed ``base_seed + r``.
    burn_in : int | None
        Burn-in of the simulations, see ``simulate_path``.
    n_jobs : int | None
        Number of replications run in parallel. Defaults to the ``n_jobs``
        setting.
    """
    dgp: ModelSpec
    T: int
    replications: int = 20
    estimators: tuple = None
    threshold_grid: ThresholdGrid = None
    slope_grid: SlopeThresholdGrid = None
    ils: IlsOptions = None
    base_seed: int = 0
    burn_in: int = None
    n_jobs: int = None

    def __post_init__(self):
        check_positive_int(self.replications, "replications")
        check_positive_int(self.T, "T", minimum=2)
        if self.estimators is None:
            self.estimators = DEFAULT_ESTIMATORS[self.dgp.kind]
        self.estimators = tuple(self.estimators)
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown or not self.estimators:
            raise ValueError(
                f"estimators should be a non-empty subset of {ESTIMATORS}. "
                f"Got {self.estimators}."
            )
        self.threshold_grid = self.threshold_grid or ThresholdGrid()
        self.slope_grid = self.slope_grid or SlopeThresholdGrid()
        self.ils = self.ils or IlsOptions()

    @property
    def dims(self):
        return self.dgp.dims

    @property
    def c_true(self):
        tf = self.dgp.transition
        return None if tf is None else tf.c

    @property
    def gamma_true(self):
        tf = self.dgp.transition
        return None if tf is None else tf.gamma


@dataclass
class McResultRow:
    """One estimator on one replication.

    Losses are ``‖kron(B̂, Â) - kron(B, A)‖²_F`` and the same for
    ``(C, D)``, NaN when the estimator or the DGP has no such regime.
    """
    replication: int
    estimator: str
    frob_regime1: float = np.nan
    frob_regime2: float = np.nan
    c_hat: float = np.nan
    gamma_hat: float = np.nan
    seconds: float = np.nan
    converged: bool = False
    status: str = 'error'
    seed: int = None
    extra: dict = field(default_factory=dict, repr=False)

    def to_dict(self):
        d = asdict(self)
        d.pop('extra')
        return d


def _run_estimator(name, series, cfg):
    if name == 'mar':
        return estimate_mar(series, cfg.ils)
    if name == 'mtar':
        return estimate_mtar(series, cfg.threshold_grid, cfg.ils)
    if name == 'mstar':
        return estimate_mstar(series, cfg.slope_grid, cfg.ils)
    if name == 'var':
        return estimate_var(series)
    if name == 'vtar':
        return estimate_vtar(series, cfg.threshold_grid)
    return estimate_vlstar(series, cfg.slope_grid, cfg.ils)


def _fitted_kron(fit):
    "Vector-form coefficients ``(Φ1, Φ2)`` of a structured or baseline fit."
    if hasattr(fit, 'phi0'):
        return fit.phi0, fit.phi1
    regimes = fit.model.regimes
    second = regimes[1].kron() if len(regimes) > 1 else None
    return regimes[0].kron(), second


def _frob_loss(estimate, truth):
    if estimate is None or truth is None:
        return np.nan
    return float(np.sum((estimate - truth) ** 2))


def _row_from_fit(replication, name, fit, dgp, seconds, seed):
    phi1, phi2 = _fitted_kron(fit)
    true1 = dgp.regime1.kron()
    true2 = None if dgp.regime2 is None else dgp.regime2.kron()
    tf = fit.model.transition if hasattr(fit, 'model') else fit.tf
    converged = getattr(fit, 'converged', True)
    return McResultRow(
        replication=replication, estimator=name,
        frob_regime1=_frob_loss(phi1, true1),
        frob_regime2=_frob_loss(phi2, true2),
        c_hat=np.nan if tf is None else tf.c,
        gamma_hat=np.nan if tf is None or tf.gamma is None else tf.gamma,
        seconds=seconds, converged=converged,
        status='done' if converged else 'max_runs', seed=seed,
    )


def run_one_replication(cfg, replication):
    """Simulate one path and run every estimator of ``cfg`` on it.

    Errors of an estimator are recorded as a row with ``converged=False``
    and ``status='error'``, unless the ``debug`` setting is on.

    Returns
    -------
    rows : list of McResultRow
    """
    seed = cfg.base_seed + replication
    rng = check_random_state(seed)
    dgp = cfg.dgp
    transition = None
    if dgp.source.kind == 'exogenous':
        # Exogenous transitions are i.i.d. U(0, 1) draws.
        burn_in = DEFAULT_BURN_IN if cfg.burn_in is None else cfg.burn_in
        transition = rng.uniform(size=burn_in + cfg.T)
    series = simulate_path(dgp, cfg.T, burn_in=cfg.burn_in, seed=rng,
                           transition=transition)

    terminal = TerminalOutput(verbose=False)
    rows = []
    for name in cfg.estimators:
        terminal.set(task=f"replication {replication} - {name}")
        t_start = time.perf_counter()
        row = None
        with exception_handler(terminal) as ctx:
            fit = _run_estimator(name, series, cfg)
            row = _row_from_fit(replication, name, fit, dgp,
                                time.perf_counter() - t_start, seed)
        if row is None:
            row = McResultRow(
                replication, name, seconds=time.perf_counter() - t_start,
                status=ctx.status, seed=seed,
                extra={'error': repr(ctx.error)},
            )
        rows.append(row)
    return rows


def run_monte_carlo(cfg, terminal=None, parallel_config=None):
    """Run the replications of a Monte Carlo experiment.

    Parameters
    ----------
    cfg : McConfig
        The experiment.
    terminal : TerminalOutput | None
        Displays the progress of the replications.
    parallel_config : dict | None
        Parallel config, see ``check_parallel_config``. Defaults to the
        ``loky`` backend with ``cfg.n_jobs`` workers.

    Returns
    -------
    rows : list of McResultRow
        Sorted by replication and by the order of ``cfg.estimators``,
        whatever the completion order.
    """
    stationary, radii = check_stationarity(cfg.dgp)
    if not stationary:
        raise ModelValidityError(
            f"The DGP is not stationary: radius products {radii} should be "
            "< 1."
        )
    if parallel_config is None:
        parallel_config = check_parallel_config(None, cfg.n_jobs)
    if terminal is None:
        terminal = TerminalOutput(verbose=False)
    terminal.set(task="monte carlo", n_tasks=cfg.replications)

    results = parallel_run(
        run_one_replication,
        ({'cfg': cfg, 'replication': r} for r in range(cfg.replications)),
        parallel_config, ordered=False
    )
    rows = []
    try:
        for replication_rows in results:
            rows.extend(replication_rows)
            terminal.progress()
    except KeyboardInterrupt:
        print(end='', flush=True)
        terminal.show_status('interrupted')
        raise

    order = {name: i for i, name in enumerate(cfg.estimators)}
    rows.sort(key=lambda row: (row.replication, order[row.estimator]))
    n_failed = sum(row.status in FAILURE_STATUS for row in rows)
    terminal.show_status(
        'error' if n_failed else 'done',
        reason=f"{n_failed} failed estimations" if n_failed else None
    )
    return rows


def _box_stats(values):
    values = values[np.isfinite(values)]
    if values.size == 0:
        return None
    q = np.quantile(values, [0, 0.25, 0.5, 0.75, 1])
    return dict(min=float(q[0]), q1=float(q[1]), median=float(q[2]),
                q3=float(q[3]), max=float(q[4]), mean=float(values.mean()),
                n=int(values.size))


def _bias_ttest(diff):
    "One-sample t-test of ``mean(diff) = 0``."
    diff = diff[np.isfinite(diff)]
    if diff.size < 2 or np.std(diff, ddof=1) == 0:
        return None, None
    res = stats.ttest_1samp(diff, 0.0)
    return float(res.statistic), float(res.pvalue)


def summarize(rows, c_true=None, gamma_true=None):
    """Summary statistics of Monte Carlo rows, per estimator.

    For each estimator: box-plot statistics (min, Q1, median, Q3, max) of
    both Frobenius losses and of ``ĉ - c0`` and ``γ̂ - γ0``, the MSE
    ``R⁻¹ Σ (θ̂_r - θ0)²`` of ``ĉ`` and ``γ̂``, a t-test of the threshold
    bias and the convergence rate.

    Parameters
    ----------
    rows : list of McResultRow
        Non-empty list of rows.
    c_true, gamma_true : float | None
        True transition parameters. The corresponding statistics are None
        when not given.

    Returns
    -------
    summary : dict
        JSON-serializable document with a ``schema_version`` field.
    """
    if len(rows) == 0:
        raise ValueError("Cannot summarize an empty list of rows.")
    df = pd.DataFrame([row.to_dict() for row in rows])

    summary = {'schema_version': SUMMARY_SCHEMA_VERSION,
               'n_rows': len(df), 'c_true': c_true,
               'gamma_true': gamma_true, 'estimators': {}}
    for name, group in df.groupby('estimator', sort=False):
        est = {
            'n_replications': int(group['replication'].nunique()),
            'convergence_rate': float(group['converged'].mean()),
            'frob_regime1': _box_stats(group['frob_regime1'].to_numpy(float)),
            'frob_regime2': _box_stats(group['frob_regime2'].to_numpy(float)),
        }
        for param, truth in [('c', c_true), ('gamma', gamma_true)]:
            diff = None
            if truth is not None:
                diff = group[f'{param}_hat'].to_numpy(float) - truth
            stats_ = None if diff is None else _box_stats(diff)
            est[f'{param}_bias'] = stats_
            est[f'mse_{param}'] = (
                None if stats_ is None
                else float(np.mean(diff[np.isfinite(diff)] ** 2))
            )
        tstat, pvalue = (None, None)
        if c_true is not None:
            with warnings.catch_warnings():
                warnings.simplefilter('ignore', RuntimeWarning)
                tstat, pvalue = _bias_ttest(
                    group['c_hat'].to_numpy(float) - c_true
                )
        est['c_bias_tstat'], est['c_bias_pvalue'] = tstat, pvalue
        summary['estimators'][name] = est
    return summary

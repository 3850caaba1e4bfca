"""Iterative least squares estimators of the MAR, MTAR and MSTAR models.

Each estimator alternates closed-form updates of the left and right
coefficients of every regime. With ``R_t`` the part of ``Y_t`` left to
explain by a regime weighted by ``w_t``, the updates are::

    L <- (Σ w_t R_t Rt X_t') (Σ w_t² X_t Rt' Rt X_t')^{-1}
    Rt <- (Σ w_t R_t' L X_t) (Σ w_t² X_t' L' L X_t)^{-1}

with ``X_t = Y_{t-1}``. Every update minimizes the SSQ given the other
factors, so the SSQ does not increase from one sweep to the next.
"""
import warnings

import numpy as np
from scipy import linalg
from scipy import optimize

from ..models import ModelSpec
from ..models import CoefficientSet
from ..models import TransitionFunction
from ..models import eval_transition
from ..tensor import MatrixNormalSpec
from ..exceptions import RankConditionError
from ..exceptions import SingularGramError
from ..stopping_criterion import EXACT_FIT
from ..parallel_backends import parallel_run
from ..parallel_backends import check_parallel_config

from .base import IlsOptions
from .base import FitResult
from .base import normalize_identification
from .grids import ThresholdGrid
from .grids import SlopeThresholdGrid

# A Gram matrix whose squared Cholesky pivots span more than 1 / RCOND is
# treated as singular.
RCOND = 1e-13
RIDGE = 1e-10

# Relative range of the threshold profile under which it is flagged as flat.
FLAT_PROFILE_TOL = 0.02

LINE_SEARCH_XTOL = 1e-6

# The second regime of an MSTAR fit is not identified when its weights g_t
# add up to less than one observation.
MIN_REGIME_WEIGHT = 1.0


def _ssq(E):
    return float(np.sum(E * E))


def _pd_solve(num, gram):
    "Return ``num @ inv(gram)`` for a symmetric positive definite ``gram``."
    factor, lower = linalg.cho_factor(gram, check_finite=False)
    pivots = np.abs(np.diag(factor)) ** 2
    if pivots.min() <= RCOND * pivots.max():
        raise linalg.LinAlgError("The Gram matrix is ill-conditioned.")
    return linalg.cho_solve((factor, lower), num.T, check_finite=False).T


def _solve_gram(num, gram, factor):
    """Solve the normal equations of one factor update.

    A ridge ``1e-10 * trace / size`` is added once if the Gram matrix is
    numerically singular. A second failure raises SingularGramError.
    """
    trace = np.trace(gram)
    if not np.isfinite(trace) or trace <= 0:
        raise SingularGramError(factor, "the Gram matrix is zero")
    try:
        return _pd_solve(num, gram)
    except linalg.LinAlgError:
        pass

    size = gram.shape[0]
    ridge = RIDGE * trace / size
    warnings.warn(
        f"Gram matrix for the update of {factor} is nearly singular, a "
        f"ridge of {ridge:.2e} is added."
    )
    try:
        return _pd_solve(num, gram + ridge * np.eye(size))
    except linalg.LinAlgError as e:
        raise SingularGramError(factor, str(e)) from e


def _update_left(R, X, right, w, factor):
    "Minimize ``Σ ‖R_t - w_t L X_t right'‖²`` over ``L``."
    XR = X @ right.T
    num = np.einsum('t,tin,tjn->ij', w, R, XR)
    gram = np.einsum('t,tin,tjn->ij', w * w, XR, XR)
    return _solve_gram(num, gram, factor)


def _update_right(R, X, left, w, factor):
    "Minimize ``Σ ‖R_t - w_t left X_t Rt'‖²`` over ``Rt``."
    LX = left @ X
    num = np.einsum('t,tki,tkj->ij', w, R, LX)
    gram = np.einsum('t,tki,tkj->ij', w * w, LX, LX)
    return _solve_gram(num, gram, factor)


def _check_lagged_frames(X):
    if not np.any(X):
        raise SingularGramError("A", "the lagged frames are all zero")


def _fit_bilinear(Y, X, right0, criterion, names=("A", "B"),
                  terminal=None, run_key=None):
    """Alternating least squares of ``Y_t ≈ L X_t Rt'``.

    Returns
    -------
    coefs : CoefficientSet
    ssq_trace : list of float
        SSQ after each sweep.
    status : str
        Status of the stopping criterion.
    """
    _check_lagged_frames(X)
    w = np.ones(Y.shape[0])
    stopping_criterion = criterion.get_runner_instance(
        scale=_ssq(Y), terminal=terminal, run_key=run_key
    )
    right, ssq_trace = right0, []
    while True:
        left = _update_left(Y, X, right, w, names[0])
        right = _update_right(Y, X, left, w, names[1])
        ssq_trace.append(_ssq(Y - left @ X @ right.T))
        stop, status = stopping_criterion.should_stop(ssq_trace)
        if stop:
            break
    return CoefficientSet(left, right), ssq_trace, status


def _zero_weights_cause(g):
    total = float(np.sum(g))
    if not total >= MIN_REGIME_WEIGHT:
        return (f"the regime-2 weights g(s_t) add up to {total:.3g}, less "
                "than one observation, so the second regime is not "
                "identified")
    return None


def _fit_mstar_given_transition(Y, X, g, right0, regime2, criterion,
                                terminal=None, run_key=None):
    """Alternating least squares of the MSTAR model for fixed ``g_t``.

    The sweep updates ``A, B`` on ``Y_t - g_t C X_t D'`` and then ``C, D``
    on ``Y_t - A X_t B'`` with weights ``g_t``.
    """
    _check_lagged_frames(X)
    cause = _zero_weights_cause(g)
    if cause is not None:
        raise SingularGramError("C", cause)
    ones = np.ones(Y.shape[0])
    gw = g[:, None, None]
    stopping_criterion = criterion.get_runner_instance(
        scale=_ssq(Y), terminal=terminal, run_key=run_key
    )
    B, C, D = right0, regime2.left, regime2.right
    ssq_trace = []
    while True:
        R1 = Y - gw * (C @ X @ D.T)
        A = _update_left(R1, X, B, ones, "A")
        B = _update_right(R1, X, A, ones, "B")
        R2 = Y - A @ X @ B.T
        C = _update_left(R2, X, D, g, "C")
        D = _update_right(R2, X, C, g, "D")
        ssq_trace.append(_ssq(R2 - gw * (C @ X @ D.T)))
        stop, status = stopping_criterion.should_stop(ssq_trace)
        if stop:
            break
    return CoefficientSet(A, B), CoefficientSet(C, D), ssq_trace, status


def _lagged_data(series, need_transition):
    Y, X, s = series.lagged_pairs()
    m, n = series.dims
    if series.T < m + n + 2:
        raise RankConditionError(
            f"The series has {series.T} frames, at least {m + n + 2} are "
            f"needed to estimate {m}x{n} coefficients."
        )
    if need_transition and s is None:
        raise ValueError(
            "The series has no transition variable s_t, which is needed to "
            "estimate a regime-switching model."
        )
    return np.asarray(Y), np.asarray(X), s


def _residual_noise(ssq, n_obs, m, n):
    "Isotropic noise with the residual variance of the fit."
    return MatrixNormalSpec.isotropic(m, n, scale=ssq / (n_obs * m * n))


def _merge_traces(traces):
    "Total SSQ after each sweep, shorter traces being held at their end."
    length = max(len(t) for t in traces)
    return [
        float(sum(t[min(k, len(t) - 1)] for t in traces))
        for k in range(length)
    ]


def estimate_mar(series, opts=None, terminal=None):
    """Least squares estimate of the MAR model ``Y_t = A Y_{t-1} B' + E_t``.

    Parameters
    ----------
    series : MatrixSeries
        Observed frames, with ``T >= m + n + 2``.
    opts : IlsOptions | None
        Options of the alternating updates.
    terminal : TerminalOutput | None
        Used to display debug lines.

    Returns
    -------
    fit : FitResult
        Normalized fit. ``converged`` is False if ``max_sweeps`` is reached.
    """
    opts = opts or IlsOptions()
    Y, X, _ = _lagged_data(series, need_transition=False)
    m, n = series.dims
    coefs, ssq_trace, status = _fit_bilinear(
        Y, X, opts.initial_right(n), opts.criterion(),
        terminal=terminal, run_key="mar"
    )
    if status == 'max_runs':
        warnings.warn(
            f"MAR estimation did not converge in {opts.max_sweeps} sweeps."
        )
    ssq = ssq_trace[-1]
    model = ModelSpec('mar', coefs,
                      noise=_residual_noise(ssq, Y.shape[0], m, n))
    fit = FitResult(
        model=model, ssq=ssq, sweeps_used=len(ssq_trace),
        converged=status == 'done', status=status, ssq_trace=ssq_trace,
        n_obs=Y.shape[0],
    )
    return normalize_identification(fit)


def _evaluate_threshold(Y, X, s, c, right0, criterion, min_obs):
    """Fit both MTAR regimes for the split ``s_t < c`` / ``s_t >= c``.

    Returns None when a regime has fewer than ``min_obs`` observations.
    """
    upper = s >= c
    n2 = int(upper.sum())
    n1 = upper.shape[0] - n2
    if min(n1, n2) < min_obs:
        return None
    regime1, trace1, status1 = _fit_bilinear(
        Y[~upper], X[~upper], right0, criterion, names=("A", "B")
    )
    regime2, trace2, status2 = _fit_bilinear(
        Y[upper], X[upper], right0, criterion, names=("C", "D")
    )
    return dict(
        c=c, ssq=trace1[-1] + trace2[-1], regimes=(regime1, regime2),
        traces=(trace1, trace2), statuses=(status1, status2),
        n_obs=(n1, n2),
    )


def estimate_mtar(series, grid=None, opts=None, terminal=None):
    """Least squares estimate of the MTAR model by a threshold grid search.

    For every candidate ``c``, the sample ``t = 2..T`` is split into
    ``s_t < c`` and ``s_t >= c`` and both regimes are fitted by alternating
    least squares. The candidate minimizing the total SSQ is reported, the
    smallest candidate winning ties.

    Parameters
    ----------
    series : MatrixSeries
        Observed frames with their transition variable.
    grid : ThresholdGrid | None
        Candidate thresholds.
    opts : IlsOptions | None
        Options of the alternating updates.
    terminal : TerminalOutput | None
        Used to display debug lines.

    Returns
    -------
    fit : FitResult
        Normalized fit whose ``grid_profile`` lists ``(c, SSQ)`` for every
        candidate, with ``None`` for the skipped ones.
    """
    opts = opts or IlsOptions()
    grid = grid or ThresholdGrid()
    Y, X, s = _lagged_data(series, need_transition=True)
    m, n = series.dims
    min_obs = m + n + 2

    candidates = grid.candidates(s)
    if candidates.size == 0:
        raise RankConditionError(
            "The threshold grid is empty: no observed s_t in the trimmed "
            "range."
        )
    right0 = opts.initial_right(n)
    criterion = opts.criterion(grid=True)
    parallel_config = check_parallel_config(None, opts.n_jobs)

    def evaluate(c):
        try:
            return _evaluate_threshold(Y, X, s, c, right0, criterion, min_obs)
        except SingularGramError as e:
            return e

    results = parallel_run(
        evaluate, ({'c': float(c)} for c in candidates),
        {**parallel_config, 'backend': 'threading'}
    )

    objective = np.full(candidates.shape[0], np.nan)
    errors = []
    for i, res in enumerate(results):
        if isinstance(res, SingularGramError):
            errors.append(res)
        elif res is not None:
            objective[i] = res['ssq']
    grid_profile = [
        (float(c), None if np.isnan(q) else float(q))
        for c, q in zip(candidates, objective)
    ]

    if np.all(np.isnan(objective)):
        error = errors[-1] if errors else RankConditionError(
            "No admissible threshold: every candidate leaves fewer than "
            f"{min_obs} observations in one regime. The data may have a "
            "single effective regime."
        )
        error.grid_profile = grid_profile
        raise error

    best = results[int(np.nanargmin(objective))]
    c_hat = best['c']

    if opts.grid_max_sweeps is not None:
        # Refit the selected split with the full sweep budget.
        best = _evaluate_threshold(Y, X, s, c_hat, right0, opts.criterion(),
                                   min_obs)
    statuses = best['statuses']
    if 'max_runs' in statuses:
        warnings.warn(
            f"MTAR estimation did not converge in {opts.max_sweeps} sweeps."
        )

    finite = objective[np.isfinite(objective)]
    rel_range = float((finite.max() - finite.min())
                      / max(finite.min(), 1e-300))
    flat = rel_range < FLAT_PROFILE_TOL
    if flat:
        warnings.warn(
            "The threshold profile is flat (relative range "
            f"{rel_range:.2e}): the data show no evidence of two regimes and "
            "the threshold is weakly identified."
        )

    ssq = best['ssq']
    noise = _residual_noise(ssq, Y.shape[0], m, n)
    model = ModelSpec('mtar', best['regimes'][0], best['regimes'][1],
                      TransitionFunction.indicator(c_hat), noise=noise)
    ssq_trace = _merge_traces(best['traces'])
    status = 'max_runs' if 'max_runs' in statuses else statuses[0]
    fit = FitResult(
        model=model, ssq=ssq, sweeps_used=len(ssq_trace),
        converged=status == 'done', status=status, ssq_trace=ssq_trace,
        grid_profile=grid_profile, n_obs=Y.shape[0],
        diagnostics={
            'flat_profile': flat,
            'profile_relative_range': rel_range,
            'n_skipped': int(np.isnan(objective).sum()),
            'regime_n_obs': best['n_obs'],
            'regime_ssq_traces': best['traces'],
        },
    )
    return normalize_identification(fit)


def mstar_loss(params, series, tf):
    """Sum of squared MSTAR residuals over ``t = 2..T``.

    Parameters
    ----------
    params : (CoefficientSet, CoefficientSet)
        ``(A, B)`` and ``(C, D)``.
    series : MatrixSeries
        Observed frames with their transition variable.
    tf : TransitionFunction
        Transition evaluated at ``s_t``.
    """
    regime1, regime2 = params
    Y, X, s = series.lagged_pairs()
    if s is None:
        raise ValueError("The series has no transition variable s_t.")
    g = np.asarray(eval_transition(tf, s))[:, None, None]
    return _ssq(Y - regime1.apply(X) - g * regime2.apply(X))


def line_search(func, x0, bounds, f0):
    """Bounded Brent search of ``func`` on ``bounds``.

    The new point is kept only if it improves on ``f0``.
    """
    lo, hi = bounds
    if not hi > lo:
        return x0, f0
    res = optimize.minimize_scalar(
        func, bounds=(lo, hi), method='bounded',
        options={'xatol': LINE_SEARCH_XTOL}
    )
    if res.fun < f0:
        return float(res.x), float(res.fun)
    return x0, f0


def estimate_mstar(series, grid=None, opts=None, terminal=None):
    """Least squares estimate of the MSTAR model.

    Phase 1 fits the four coefficient matrices for every ``(γ, c)`` of the
    grid. Phase 2 starts from the best pair and alternates a coordinate
    search of ``(γ, c)`` for fixed matrices with the alternating updates of
    the matrices for fixed ``(γ, c)``, until the relative change of SSQ is
    below ``opts.rel_tol``. ``γ`` is searched within the grid envelope and
    ``c`` within the trimmed range of ``s_t``.

    Parameters
    ----------
    series : MatrixSeries
        Observed frames with their transition variable.
    grid : SlopeThresholdGrid | None
        Candidate ``(γ, c)`` pairs of phase 1.
    opts : IlsOptions | None
        Options of the alternating updates.
    terminal : TerminalOutput | None
        Used to display debug lines.

    Returns
    -------
    fit : FitResult
        Normalized fit whose ``grid_profile`` lists ``(γ, c, SSQ)`` for the
        phase 1 candidates and whose ``ssq_trace`` is the phase 2 trace.
    """
    opts = opts or IlsOptions()
    grid = grid or SlopeThresholdGrid()
    Y, X, s = _lagged_data(series, need_transition=True)
    _check_lagged_frames(X)
    m, n = series.dims

    right0 = opts.initial_right(n)
    regime2_0 = opts.initial_regime2(m, n)
    criterion = opts.criterion(grid=True)
    parallel_config = check_parallel_config(None, opts.n_jobs)

    def evaluate(gamma, c):
        g = eval_transition(TransitionFunction.logistic(gamma, c), s)
        try:
            regime1, regime2, trace, status = _fit_mstar_given_transition(
                Y, X, g, right0, regime2_0, criterion
            )
        except SingularGramError as e:
            return e
        return dict(gamma=gamma, c=c, ssq=trace[-1],
                    regimes=(regime1, regime2), status=status)

    candidates = grid.candidates(s)
    results = parallel_run(
        evaluate, ({'gamma': gamma, 'c': c} for gamma, c in candidates),
        {**parallel_config, 'backend': 'threading'}
    )
    objective = np.array([
        np.nan if isinstance(res, SingularGramError) else res['ssq']
        for res in results
    ])
    grid_profile = [
        (gamma, c, None if np.isnan(q) else float(q))
        for (gamma, c), q in zip(candidates, objective)
    ]
    if np.all(np.isnan(objective)):
        error = results[-1]
        error.grid_profile = grid_profile
        raise error

    best = results[int(np.nanargmin(objective))]
    gamma, c = best['gamma'], best['c']
    regime1, regime2 = best['regimes']
    ssq = best['ssq']

    # Phase 2: alternate the transition and the matrices.
    gamma_bounds, c_bounds = grid.search_bounds(s)
    tss = _ssq(Y)
    full_criterion = opts.criterion()
    ssq_trace, status = [ssq], 'max_runs'
    for _ in range(opts.max_sweeps):
        M1, M2 = regime1.apply(X), regime2.apply(X)

        def transition_loss(gamma, c):
            g = eval_transition(TransitionFunction.logistic(gamma, c), s)
            return _ssq(Y - M1 - g[:, None, None] * M2)

        gamma, cur = line_search(
            lambda x: transition_loss(x, c), gamma, gamma_bounds, ssq
        )
        c, cur = line_search(
            lambda x: transition_loss(gamma, x), c, c_bounds, cur
        )
        g = eval_transition(TransitionFunction.logistic(gamma, c), s)
        regime1, regime2, trace, _ = _fit_mstar_given_transition(
            Y, X, g, regime1.right, regime2, full_criterion,
            terminal=terminal, run_key="mstar"
        )
        prev, ssq = ssq, trace[-1]
        ssq_trace.append(ssq)
        if (ssq <= EXACT_FIT * tss
                or abs(ssq - prev) / max(prev, 1e-300) < opts.rel_tol):
            status = 'done'
            break

    if status == 'max_runs':
        warnings.warn(
            f"MSTAR estimation did not converge in {opts.max_sweeps} "
            "iterations."
        )
    gamma_at_bound = (
        gamma_bounds[1] > gamma_bounds[0]
        and min(abs(gamma - gamma_bounds[0]), abs(gamma - gamma_bounds[1]))
        < 10 * LINE_SEARCH_XTOL
    )
    if gamma_at_bound:
        warnings.warn(
            f"The slope estimate γ = {gamma:.4g} is clipped to the grid "
            f"envelope {gamma_bounds}."
        )

    model = ModelSpec('mstar', regime1, regime2,
                      TransitionFunction.logistic(gamma, c),
                      noise=_residual_noise(ssq, Y.shape[0], m, n))
    fit = FitResult(
        model=model, ssq=ssq, sweeps_used=len(ssq_trace) - 1,
        converged=status == 'done', status=status, ssq_trace=ssq_trace,
        grid_profile=grid_profile, n_obs=Y.shape[0],
        diagnostics={
            'grid_best': (best['gamma'], best['c'], best['ssq']),
            'gamma_at_bound': bool(gamma_at_bound),
            'n_skipped': int(np.isnan(objective).sum()),
        },
    )
    return normalize_identification(fit)

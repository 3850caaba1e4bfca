"""Unrestricted vector autoregressions on ``vec(Y_t)``.

These baselines ignore the Kronecker structure of the matrix models and
estimate ``(mn)²`` coefficients per regime by OLS. They share the grids and
tolerances of the structured estimators. No intercept is fitted.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .models import TransitionFunction
from .models import eval_transition
from .exceptions import RankConditionError
from .estimation import IlsOptions
from .estimation import ThresholdGrid
from .estimation import SlopeThresholdGrid
from .estimation.ils import FLAT_PROFILE_TOL
from .estimation.ils import line_search
from .stopping_criterion import EXACT_FIT

# Singular values below RANK_TOL * largest are treated as zero.
RANK_TOL = 1e-10

BASELINE_KINDS = ('var', 'vtar', 'vlstar')


@dataclass
class VecModelFit:
    """Fit of a vectorized baseline.

    ``phi0`` is the coefficient of ``vec(Y_{t-1})`` (first regime for
    VTAR). ``phi1`` is the second regime for VTAR and the coefficient of
    ``g_t vec(Y_{t-1})`` for VLSTAR.
    """
    kind: str
    phi0: np.ndarray
    ssq: float
    phi1: np.ndarray = None
    tf: TransitionFunction = None
    grid_profile: list = None
    n_obs: int = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def n_params(self):
        k = self.phi0.shape[0] ** 2
        return {'var': k, 'vtar': 2 * k + 1, 'vlstar': 2 * k + 2}[self.kind]


def _ols(x, y, what="vec(Y_{t-1})"):
    """OLS of the rows of ``y`` on the rows of ``x``.

    Returns the coefficient ``Φ`` of ``y_t = Φ x_t`` and the SSQ.
    """
    coef, _, rank, _ = linalg.lstsq(x, y, cond=RANK_TOL, check_finite=False)
    if rank < x.shape[1]:
        raise RankConditionError(
            f"The regressors {what} are rank deficient (rank {rank} < "
            f"{x.shape[1]})."
        )
    E = y - x @ coef
    return coef.T, float(np.sum(E * E))


def _vectorized_pairs(series, min_obs, need_transition=False):
    Yv = series.vectorized()
    y, x = Yv[1:], Yv[:-1]
    if series.T < min_obs:
        raise RankConditionError(
            f"The series has {series.T} frames, at least {min_obs} are "
            "needed for the vectorized regression."
        )
    s = None
    if need_transition:
        if series.transition is None:
            raise ValueError("The series has no transition variable s_t.")
        s = series.transition[1:]
    return y, x, s


def estimate_var(series):
    """OLS estimate of ``vec(Y_t) = Φ vec(Y_{t-1}) + e_t``.

    Parameters
    ----------
    series : MatrixSeries
        Observed frames, with ``T >= mn + 2``.

    Returns
    -------
    fit : VecModelFit
    """
    m, n = series.dims
    y, x, _ = _vectorized_pairs(series, m * n + 2)
    phi, ssq = _ols(x, y)
    return VecModelFit('var', phi, ssq, n_obs=y.shape[0])


def estimate_vtar(series, grid=None):
    """Two-regime VTAR estimate by a threshold grid search.

    For each candidate ``c``, both regimes ``s_t < c`` and ``s_t >= c`` are
    fitted by OLS and the candidate with the smallest pooled SSQ is kept.
    Candidates leaving fewer than ``mn + 2`` observations in a regime are
    skipped.
    """
    grid = grid or ThresholdGrid()
    m, n = series.dims
    k = m * n
    y, x, s = _vectorized_pairs(series, k + 2, need_transition=True)
    candidates = grid.candidates(s)

    grid_profile, best = [], None
    for c in candidates:
        upper = s >= c
        res = None
        if min(upper.sum(), (~upper).sum()) >= k + 2:
            try:
                phi0, ssq0 = _ols(x[~upper], y[~upper])
                phi1, ssq1 = _ols(x[upper], y[upper])
                res = (float(c), phi0, phi1, ssq0 + ssq1)
            except RankConditionError:
                res = None
        grid_profile.append((float(c), None if res is None else res[3]))
        # Strict comparison keeps the smallest candidate on ties.
        if res is not None and (best is None or res[3] < best[3]):
            best = res
    if best is None:
        raise RankConditionError(
            "No admissible threshold for the VTAR baseline: every candidate "
            f"leaves fewer than {k + 2} observations or a rank deficient "
            "regime."
        )

    values = np.array([q for _, q in grid_profile if q is not None])
    rel_range = float((values.max() - values.min())
                      / max(values.min(), 1e-300))
    flat = rel_range < FLAT_PROFILE_TOL
    if flat:
        warnings.warn(
            f"The VTAR threshold profile is flat (relative range "
            f"{rel_range:.2e})."
        )
    c_hat, phi0, phi1, ssq = best
    return VecModelFit(
        'vtar', phi0, ssq, phi1=phi1, tf=TransitionFunction.indicator(c_hat),
        grid_profile=grid_profile, n_obs=y.shape[0],
        diagnostics={'flat_profile': flat,
                     'profile_relative_range': rel_range},
    )


def _vlstar_ols(x, y, s, gamma, c):
    g = eval_transition(TransitionFunction.logistic(gamma, c), s)
    design = np.hstack([x, g[:, None] * x])
    coef, ssq = _ols(design, y,
                     what="[vec(Y_{t-1}), g(s_t) vec(Y_{t-1})]")
    k = x.shape[1]
    return coef[:, :k], coef[:, k:], ssq


def estimate_vlstar(series, grid=None, opts=None):
    """VLSTAR estimate with a single logistic transition.

    The model ``vec(Y_t) = Φ0 y_{t-1} + g(γ, c; s_t) Φ1 y_{t-1} + e_t`` is
    linear given ``(γ, c)``. The grid is searched first, candidates with
    collinear regressors being skipped, and the best pair is refined by a
    coordinate search of the concentrated SSQ.

    Parameters
    ----------
    series : MatrixSeries
        Observed frames with their transition variable.
    grid : SlopeThresholdGrid | None
        Candidate ``(γ, c)`` pairs.
    opts : IlsOptions | None
        Only ``rel_tol`` and ``max_sweeps`` are used, for the refinement.
    """
    grid = grid or SlopeThresholdGrid()
    opts = opts or IlsOptions()
    m, n = series.dims
    k = m * n
    y, x, s = _vectorized_pairs(series, 2 * k + 2, need_transition=True)
    if not np.any(x):
        raise RankConditionError("The lagged frames are all zero.")

    grid_profile, best = [], None
    for gamma, c in grid.candidates(s):
        try:
            _, _, ssq = _vlstar_ols(x, y, s, gamma, c)
        except RankConditionError:
            ssq = None
        grid_profile.append((gamma, c, ssq))
        if ssq is not None and (best is None or ssq < best[2]):
            best = (gamma, c, ssq)
    if best is None:
        raise RankConditionError(
            "Every (gamma, c) candidate of the VLSTAR baseline gives "
            "collinear regressors: the transition g(s_t) is nearly constant "
            "on the sample."
        )

    def concentrated_ssq(gamma, c):
        try:
            return _vlstar_ols(x, y, s, gamma, c)[2]
        except RankConditionError:
            return np.inf

    gamma, c, ssq = best
    gamma_bounds, c_bounds = grid.search_bounds(s)
    tss = float(np.sum(y * y))
    for _ in range(opts.max_sweeps):
        prev = ssq
        gamma, ssq = line_search(lambda v: concentrated_ssq(v, c), gamma,
                                 gamma_bounds, ssq)
        c, ssq = line_search(lambda v: concentrated_ssq(gamma, v), c,
                             c_bounds, ssq)
        if (ssq <= EXACT_FIT * tss
                or abs(prev - ssq) / max(prev, 1e-300) < opts.rel_tol):
            break

    phi0, phi1, ssq = _vlstar_ols(x, y, s, gamma, c)
    return VecModelFit(
        'vlstar', phi0, ssq, phi1=phi1,
        tf=TransitionFunction.logistic(gamma, c), grid_profile=grid_profile,
        n_obs=y.shape[0], diagnostics={'grid_best': best},
    )

"""Lagrange multiplier tests of linearity against smooth transitions.

Under the null, ``vec(Y_t)`` follows a linear VAR on ``vec(Y_{t-1})``. The
alternative is approximated by a Taylor expansion of the transition around
``γ = 0``, which adds the regressors ``vec(Y_{t-1}) s_t^k``, ``k = 1..K``.
The expansion also has power against threshold alternatives, the indicator
being the limit of the logistic for large ``γ``.
"""
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy import stats

from .exceptions import RankConditionError
from .utils.checkers import check_positive_int

DEFAULT_TAYLOR_ORDER = 3
LM_FORMS = ('score', 'tr2')

# A Gram matrix is positive definite when its smallest eigenvalue is above
# PD_TOL times its largest one.
PD_TOL = 1e-10


@dataclass(frozen=True)
class LmTestResult:
    """Outcome of a linearity test.

    ``p_value`` is the upper tail of the χ² distribution with ``dof``
    degrees of freedom at ``statistic``.
    """
    statistic: float
    dof: int
    p_value: float
    form: str
    taylor_order: int
    n_obs: int = None

    def to_dict(self):
        return dict(statistic=self.statistic, dof=self.dof,
                    p_value=self.p_value, form=self.form,
                    taylor_order=self.taylor_order, n_obs=self.n_obs)


def lm_dof(mn, K):
    """Degrees of freedom ``mn`` times the number of columns of ``Z_K``."""
    return mn * mn * K


def build_taylor_regressors(series, K=DEFAULT_TAYLOR_ORDER):
    """Regressors of the restricted and auxiliary regressions.

    Parameters
    ----------
    series : MatrixSeries
        Observed frames with their transition variable.
    K : int
        Order of the Taylor expansion, ``K >= 1``. The ``k = 0`` term is
        part of the linear regressors.

    Returns
    -------
    X : ndarray, shape (T - 1, mn)
        Row ``t`` is ``vec(Y_{t-1})'``.
    Z : ndarray, shape (T - 1, mn K)
        Row ``t`` is ``[vec(Y_{t-1})' s_t, ..., vec(Y_{t-1})' s_t^K]``.
    """
    K = check_positive_int(K, "K")
    if series.transition is None:
        raise ValueError(
            "The linearity test needs a transition variable s_t."
        )
    X = series.vectorized()[:-1]
    s = series.transition[1:]
    Z = np.hstack([X * (s ** k)[:, None] for k in range(1, K + 1)])
    return X, Z


def _largest_eigval(gram):
    return max(float(linalg.eigvalsh(gram)[-1]), 0.0)


def _check_pd(gram, name, scale=None):
    """Check that the smallest eigenvalue of ``gram`` is above ``PD_TOL``
    times ``scale``, the largest eigenvalue of ``gram`` by default.
    """
    eigval = linalg.eigvalsh(gram)
    if scale is None:
        scale = max(eigval[-1], 0.0)
    if not eigval[0] > PD_TOL * scale:
        raise RankConditionError(
            f"The rank condition fails: {name} is not positive definite "
            f"(eigenvalues in [{eigval[0]:.3e}, {eigval[-1]:.3e}]). The "
            "regressors should not be collinear and s_t should not be "
            "constant."
        )


def _restricted_residuals(y, X):
    _check_pd(X.T @ X, "X'X")
    coef = linalg.lstsq(X, y, check_finite=False)[0]
    return y - X @ coef


def _project_out(Z, X):
    "Residuals of the columns of ``Z`` on ``X``, that is ``(I - P_X) Z``."
    return Z - X @ linalg.lstsq(X, Z, check_finite=False)[0]


def score_statistic(y, X, Z):
    """Score form ``tr(Σ⁻¹ E'Z [Z'(I - P_X)Z]⁻¹ Z'E)``.

    ``E`` are the residuals of ``y`` on ``X`` and ``Σ = E'E / T'``.
    """
    E = _restricted_residuals(y, X)
    Zr = _project_out(Z, X)
    M = Zr.T @ Zr
    _check_pd(M, "Z_K'(I - P_X)Z_K", _largest_eigval(Z.T @ Z))
    sigma = E.T @ E / y.shape[0]
    _check_pd(sigma, "the residual covariance")
    EZ = E.T @ Zr
    inner = EZ @ linalg.solve(M, EZ.T, assume_a='pos')
    stat = np.trace(linalg.solve(sigma, inner, assume_a='pos'))
    return max(float(stat), 0.0)


def tr2_statistic(y, X, Z):
    """TR² form ``T'(mn - tr((E'E)⁻¹ Ξ'Ξ))``.

    ``E`` are the residuals of ``y`` on ``X`` and ``Ξ`` the residuals of the
    auxiliary regression of ``E`` on ``[X, Z]``.
    """
    E = _restricted_residuals(y, X)
    gram_e = E.T @ E
    _check_pd(gram_e, "the residual Gram matrix E'E")
    XZ = np.hstack([X, Z])
    Zr = _project_out(Z, X)
    _check_pd(Zr.T @ Zr, "Z_K'(I - P_X)Z_K", _largest_eigval(Z.T @ Z))
    Xi = E - XZ @ linalg.lstsq(XZ, E, check_finite=False)[0]
    n_obs, mn = y.shape
    stat = n_obs * (mn - np.trace(linalg.solve(gram_e, Xi.T @ Xi,
                                               assume_a='pos')))
    return max(float(stat), 0.0)


def _lm_test(series, K, form):
    X, Z = build_taylor_regressors(series, K)
    y = series.vectorized()[1:]
    statistic = {'score': score_statistic, 'tr2': tr2_statistic}[form](
        y, X, Z
    )
    dof = lm_dof(X.shape[1], K)
    return LmTestResult(
        statistic=statistic, dof=dof,
        p_value=float(stats.chi2.sf(statistic, dof)),
        form=form, taylor_order=K, n_obs=y.shape[0],
    )


def lm_test_score(series, K=DEFAULT_TAYLOR_ORDER):
    """LM linearity test in its score form, χ²((mn)² K) under the null."""
    return _lm_test(series, K, 'score')


def lm_test_tr2(series, K=DEFAULT_TAYLOR_ORDER):
    """LM linearity test in its TR² form.

    Asymptotically equivalent to :func:`lm_test_score`.
    """
    return _lm_test(series, K, 'tr2')


def rank_diagnostics(series, K=DEFAULT_TAYLOR_ORDER):
    """Conditioning of the matrices inverted by the linearity tests.

    Returns the number of observations and regressors, the rank of
    ``[X, Z_K]`` and the smallest eigenvalues of ``X'X`` and
    ``Z_K'(I - P_X)Z_K`` relative to the largest eigenvalues of ``X'X`` and
    ``Z_K'Z_K``. Both ratios should be above ``PD_TOL``.
    """
    X, Z = build_taylor_regressors(series, K)

    def ratio(gram, scale):
        return float(linalg.eigvalsh(gram)[0] / scale) if scale > 0 else 0.0

    XZ = np.hstack([X, Z])
    Zr = _project_out(Z, X)
    return {
        'n_obs': X.shape[0],
        'n_regressors': XZ.shape[1],
        'rank': int(np.linalg.matrix_rank(XZ)),
        'x_eig_ratio': ratio(X.T @ X, _largest_eigval(X.T @ X)),
        'z_eig_ratio': ratio(Zr.T @ Zr, _largest_eigval(Z.T @ Z)),
        'pd_tol': PD_TOL,
    }

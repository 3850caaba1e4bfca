import warnings

import numpy as np
from scipy import linalg
from scipy import stats

from ..models import residuals
from ..exceptions import RankConditionError

# Eigenvalues of a Gram matrix below NULL_TOL * largest span its null space.
NULL_TOL = 1e-10

FACTOR_NAMES = (('A', 'B'), ('C', 'D'))


def _entry_pvalues(M, gram, sigma2):
    """Two-sided normal p-values of the entries of ``M``.

    The variance of ``M[i, j]`` is ``sigma2 * inv(gram)[j, j]``. Entries of
    columns along the null space of ``gram`` get NaN.
    """
    eigval, eigvec = linalg.eigh(gram)
    keep = eigval > NULL_TOL * max(eigval.max(), 0.0)
    inv_diag = np.sum(eigvec[:, keep] ** 2 / eigval[keep], axis=1)
    in_null = np.sum(eigvec[:, ~keep] ** 2, axis=1) > 1e-8
    se = np.sqrt(sigma2 * inv_diag)
    with np.errstate(divide='ignore', invalid='ignore'):
        tstat = M / se[None, :]
    pvalues = 2 * stats.norm.sf(np.abs(tstat))
    pvalues[:, in_null] = np.nan
    return pvalues


def coefficient_inference(fit, series):
    """P-values of every coefficient entry of a fitted model.

    The transition values (or the threshold split) are held at their fitted
    values. Given the other factor of its regime, each coefficient matrix
    enters the fitted mean linearly, so its entries are tested with the OLS
    covariance of that regression. The residual variance is
    ``SSQ / (N - Σ (m² + n² - 1))`` with ``N = (T - 1) m n``, the sum
    running over the regimes.

    Parameters
    ----------
    fit : FitResult
        Fitted model, ideally converged.
    series : MatrixSeries
        Series the model was fitted on.

    Returns
    -------
    pvalues : dict
        Matrices of p-values aligned with ``'A'``, ``'B'`` (and ``'C'``,
        ``'D'``). Entries with a rank-deficient design are NaN.
    """
    model = fit.model
    Y, X, s = series.lagged_pairs()
    if model.kind != 'mar' and s is None:
        raise ValueError("The series has no transition variable s_t.")
    if not fit.converged:
        warnings.warn(
            "coefficient_inference is computed on a fit which did not "
            "converge."
        )

    m, n = model.dims
    dof = Y.shape[0] * m * n - len(model.regimes) * (m * m + n * n - 1)
    if dof <= 0:
        raise RankConditionError(
            f"Not enough observations for inference: {dof} degrees of "
            "freedom left."
        )
    E = residuals(model, series).frames
    sigma2 = float(np.sum(E * E)) / dof

    ones = np.ones(Y.shape[0])
    if model.kind == 'mar':
        weights = [ones]
    elif model.kind == 'mtar':
        upper = (model.weights(s) > 0).astype(np.float64)
        weights = [1 - upper, upper]
    else:
        weights = [ones, model.weights(s)]

    pvalues = {}
    for (left_name, right_name), regime, w in zip(
            FACTOR_NAMES, model.regimes, weights):
        w2 = w * w
        XR = X @ regime.right.T
        gram = np.einsum('t,tin,tjn->ij', w2, XR, XR)
        pvalues[left_name] = _entry_pvalues(regime.left, gram, sigma2)
        LX = regime.left @ X
        gram = np.einsum('t,tki,tkj->ij', w2, LX, LX)
        pvalues[right_name] = _entry_pvalues(regime.right, gram, sigma2)
    return pvalues

"""Analytic gradients of the least squares objectives.

They are not used by the estimators, which rely on closed-form updates,
but they give first-order conditions to check fitted models against.
"""
import numpy as np

from ..models import eval_transition


def _split_weights(series, tf):
    Y, X, s = series.lagged_pairs()
    if s is None:
        raise ValueError("The series has no transition variable s_t.")
    return Y, X, np.asarray(eval_transition(tf, s), dtype=np.float64)


def _weighted_gradients(Y, X, w1, w2, regime1, regime2):
    """Gradients of ``Σ ‖Y_t - w1_t A X_t B' - w2_t C X_t D'‖²``."""
    A, B = regime1.left, regime1.right
    C, D = regime2.left, regime2.right
    E = Y - w1[:, None, None] * (A @ X @ B.T) \
        - w2[:, None, None] * (C @ X @ D.T)

    def left_grad(w, right):
        return -2 * np.einsum('t,tin,tjn->ij', w, E, X @ right.T)

    def right_grad(w, left):
        return -2 * np.einsum('t,tki,tkj->ij', w, E, left @ X)

    return (left_grad(w1, B), right_grad(w1, A),
            left_grad(w2, D), right_grad(w2, C))


def mstar_gradients(params, series, tf):
    """Gradients of ``mstar_loss`` with respect to ``A, B, C, D``.

    With ``E_t`` the residuals and ``g_t = g(s_t)``::

        dQ/dA = -2 Σ E_t B X_t'        dQ/dB = -2 Σ E_t' A X_t
        dQ/dC = -2 Σ g_t E_t D X_t'    dQ/dD = -2 Σ g_t E_t' C X_t

    Parameters
    ----------
    params : (CoefficientSet, CoefficientSet)
        ``(A, B)`` and ``(C, D)``.
    series : MatrixSeries
        Observed frames with their transition variable.
    tf : TransitionFunction
        Logistic transition.

    Returns
    -------
    grads : tuple of 4 ndarray
        ``(dQ/dA, dQ/dB, dQ/dC, dQ/dD)``.
    """
    regime1, regime2 = params
    Y, X, g = _split_weights(series, tf)
    return _weighted_gradients(Y, X, np.ones_like(g), g, regime1, regime2)


def mtar_loss(params, series, tf):
    """Total SSQ of the two MTAR regimes split by the indicator ``tf``."""
    regime1, regime2 = params
    Y, X, g = _split_weights(series, tf)
    upper = g > 0
    E1 = Y[~upper] - regime1.apply(X[~upper])
    E2 = Y[upper] - regime2.apply(X[upper])
    return float(np.sum(E1 * E1) + np.sum(E2 * E2))


def mtar_gradients(params, series, tf):
    """Gradients of ``mtar_loss`` with respect to ``A, B, C, D``.

    The sums run over ``s_t < c`` for ``A, B`` and over ``s_t >= c`` for
    ``C, D``. An empty regime has zero gradients.
    """
    regime1, regime2 = params
    Y, X, g = _split_weights(series, tf)
    upper = (g > 0).astype(np.float64)
    return _weighted_gradients(Y, X, 1 - upper, upper, regime1, regime2)

"""Data generating processes of the simulation studies of marswitch."""
import numpy as np

from ..models import ModelSpec
from ..models import CoefficientSet
from ..models import TransitionSource
from ..models import TransitionFunction
from ..tensor import MatrixNormalSpec
from ..utils.checkers import check_random_state, check_positive_int


def _rescale_regime(coefs, max_radius):
    """Shrink ``(L, R)`` so that ``ρ(L) ρ(R) <= max_radius``.

    Both factors are scaled by the same ``f`` so that the product scales as
    ``f²``.
    """
    radius = coefs.radius()
    if radius < max_radius:
        return coefs
    f = np.sqrt(max_radius / radius)
    return CoefficientSet(f * coefs.left, f * coefs.right)


def _uniform_regime(rng, m, n, low, high):
    return CoefficientSet(rng.uniform(low, high, size=(m, m)),
                          rng.uniform(low, high, size=(n, n)))


def make_mar_dgp(m, n, left_scale=0.2, right_scale=0.2, noise_scale=1.0):
    r"""Linear MAR model with diagonal coefficients.

    .. math ::
        Y_t = a I_m Y_{t-1} (b I_n)' + E_t, \quad E_t \sim MN(0, s I, I)

    Parameters
    ----------
    m, n : int
        Dimensions of the frames.
    left_scale, right_scale : float
        Diagonal values ``a`` and ``b``, with ``|a b| < 1``.
    noise_scale : float
        Variance ``s`` of every noise entry.

    Returns
    -------
    model : ModelSpec
    """
    m = check_positive_int(m, "m")
    n = check_positive_int(n, "n")
    return ModelSpec(
        'mar', CoefficientSet(left_scale * np.eye(m), right_scale * np.eye(n)),
        noise=MatrixNormalSpec.isotropic(m, n, noise_scale),
    )


def make_mtar_dgp(m, n, c=0.30, random_state=0,
                  regime1_range=(0.1, 0.2), regime2_range=(0.25, 0.4),
                  noise_scale=1.0, max_radius=0.9, source=None):
    """MTAR model with uniform random coefficients and a trend transition.

    The entries of ``A, B`` are drawn in ``regime1_range`` and those of
    ``C, D`` in ``regime2_range``, once for all replications. Large
    dimensions make these draws explosive, so each regime is shrunk until
    ``ρ(left) ρ(right) <= max_radius``.

    Parameters
    ----------
    m, n : int
        Dimensions of the frames.
    c : float
        Threshold of the indicator transition.
    random_state : int | Generator | None
        Seed of the coefficient draws.
    regime1_range, regime2_range : (float, float)
        Bounds of the uniform draws.
    noise_scale : float
        Variance of every noise entry.
    max_radius : float
        Upper bound on the radius product of each regime, in ``(0, 1)``.
    source : TransitionSource | None
        Defaults to the normalized trend ``s_t = t / T``.

    Returns
    -------
    model : ModelSpec
    """
    if not 0 < max_radius < 1:
        raise ValueError(
            f"max_radius should be in (0, 1). Got {max_radius}."
        )
    rng = check_random_state(random_state)
    regime1 = _rescale_regime(_uniform_regime(rng, m, n, *regime1_range),
                              max_radius)
    regime2 = _rescale_regime(_uniform_regime(rng, m, n, *regime2_range),
                              max_radius)
    return ModelSpec(
        'mtar', regime1, regime2, TransitionFunction.indicator(c),
        noise=MatrixNormalSpec.isotropic(m, n, noise_scale),
        source=source or TransitionSource('trend'),
    )


def make_mstar_dgp(m, n, gamma=10.0, c=0.65, regime1_scale=0.2,
                   regime2_scale=0.75, noise_scale=1.0, source=None):
    """MSTAR model with diagonal regimes and a logistic trend transition.

    ``A = B = regime1_scale * I`` and ``C = D = regime2_scale * I``.

    Parameters
    ----------
    m, n : int
        Dimensions of the frames.
    gamma, c : float
        Slope and location of the logistic transition.
    regime1_scale, regime2_scale : float
        Diagonal values of the two regimes.
    noise_scale : float
        Variance of every noise entry.
    source : TransitionSource | None
        Defaults to the normalized trend ``s_t = t / T``.

    Returns
    -------
    model : ModelSpec
    """
    m = check_positive_int(m, "m")
    n = check_positive_int(n, "n")
    return ModelSpec(
        'mstar',
        CoefficientSet(regime1_scale * np.eye(m), regime1_scale * np.eye(n)),
        CoefficientSet(regime2_scale * np.eye(m), regime2_scale * np.eye(n)),
        TransitionFunction.logistic(gamma, c),
        noise=MatrixNormalSpec.isotropic(m, n, noise_scale),
        source=source or TransitionSource('trend'),
    )

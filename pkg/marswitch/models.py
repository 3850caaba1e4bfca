"""Linear and regime-switching matrix autoregressive models.

Three model kinds share one :class:`ModelSpec`:

* ``'mar'``:   ``Y_t = A Y_{t-1} B' + E_t``
* ``'mtar'``:  ``Y_t = A Y_{t-1} B' + E_t`` when ``s_t < c`` and
  ``Y_t = C Y_{t-1} D' + E_t`` when ``s_t >= c``
* ``'mstar'``: ``Y_t = A Y_{t-1} B' + g(γ, c; s_t) C Y_{t-1} D' + E_t``

In vector form the regime coefficients are ``kron(B, A)`` and
``kron(D, C)``.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from .tensor import kron
from .tensor import as_matrix
from .tensor import MatrixSeries
from .tensor import MatrixNormalSpec
from .tensor import spectral_radius
from .tensor import sample_matrix_normal
from .exceptions import ModelValidityError
from .utils.checkers import check_random_state, check_positive_int

MODEL_KINDS = ('mar', 'mtar', 'mstar')
TRANSITION_KINDS = ('logistic', 'indicator')
SOURCE_KINDS = ('trend', 'lagged_entry', 'exogenous')

DEFAULT_BURN_IN = 100


@dataclass(frozen=True)
class TransitionFunction:
    """Transition function ``g(γ, c; s)`` with values in ``[0, 1]``.

    ``kind='logistic'`` is ``1 / (1 + exp(-γ (s - c)))`` and
    ``kind='indicator'`` is ``1(s >= c)``: ties go to the second regime.
    """
    kind: str
    c: float
    gamma: float = None

    def __post_init__(self):
        if self.kind not in TRANSITION_KINDS:
            raise ValueError(
                f"kind should be in {TRANSITION_KINDS}. Got '{self.kind}'."
            )
        if not np.isfinite(self.c):
            raise ValueError("The threshold c should be finite.")
        object.__setattr__(self, 'c', float(self.c))
        if self.kind == 'logistic':
            if self.gamma is None or not self.gamma > 0:
                raise ValueError(
                    f"The slope gamma should be > 0. Got {self.gamma}."
                )
            object.__setattr__(self, 'gamma', float(self.gamma))

    @classmethod
    def logistic(cls, gamma, c):
        return cls('logistic', c, gamma)

    @classmethod
    def indicator(cls, c):
        return cls('indicator', c)

    def __call__(self, s):
        return eval_transition(self, s)


def eval_transition(tf, s):
    """Evaluate the transition function at ``s`` (scalar or array).

    The logistic is computed as ``0.5 * (1 + tanh(γ (s - c) / 2))`` which
    does not overflow for large ``γ``.
    """
    s = np.asarray(s, dtype=np.float64)
    if tf.kind == 'indicator':
        g = (s >= tf.c).astype(np.float64)
    else:
        g = 0.5 * (1.0 + np.tanh(0.5 * tf.gamma * (s - tf.c)))
    return float(g) if g.ndim == 0 else g


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    """Pair of left (``m x m``) and right (``n x n``) coefficient matrices."""
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        left = as_matrix(self.left, "left coefficient")
        right = as_matrix(self.right, "right coefficient")
        for M, name in [(left, "left"), (right, "right")]:
            if M.shape[0] != M.shape[1]:
                raise ValueError(
                    f"The {name} coefficient should be square. "
                    f"Got shape {M.shape}."
                )
        object.__setattr__(self, 'left', left)
        object.__setattr__(self, 'right', right)

    @property
    def dims(self):
        return self.left.shape[0], self.right.shape[0]

    def kron(self):
        "Kronecker coefficient ``kron(right, left)`` of the vector form."
        return kron(self.right, self.left)

    def apply(self, Y):
        "Return ``left @ Y @ right.T`` (broadcast over leading axes)."
        return self.left @ Y @ self.right.T

    def radius(self):
        return spectral_radius(self.left) * spectral_radius(self.right)


@dataclass(frozen=True)
class TransitionSource:
    """How the transition variable ``s_t`` is produced.

    * ``'trend'``: normalized trend ``s_t = t / T``.
    * ``'lagged_entry'``: ``s_t = Y_{t-lag}[row, col]``.
    * ``'exogenous'``: ``s_t`` is given by the user with the series.
    """
    kind: str = 'trend'
    row: int = 0
    col: int = 0
    lag: int = 1

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ValueError(
                f"kind should be in {SOURCE_KINDS}. Got '{self.kind}'."
            )
        if self.kind == 'lagged_entry':
            check_positive_int(self.lag, "lag")

    def to_dict(self):
        d = {'kind': self.kind}
        if self.kind == 'lagged_entry':
            d.update(row=self.row, col=self.col, lag=self.lag)
        return d

    def next_value(self, series):
        """Value of ``s_{T+1}`` used for one-step forecasts.

        Trend: ``(T + 1) / T``. Lagged entry: the entry of the frame
        ``Y_{T+1-lag}``. Exogenous: the last observed value.
        """
        T = series.T
        if self.kind == 'trend':
            return (T + 1) / T
        if self.kind == 'lagged_entry':
            if self.lag > T:
                raise ValueError(
                    f"s_(T+1) needs Y_(T+1-lag), the lag {self.lag} is "
                    f"larger than the {T} frames of the series."
                )
            return float(series.frames[T - self.lag, self.row, self.col])
        if series.transition is None:
            raise ValueError("The series has no transition variable.")
        return float(series.transition[-1])


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Specification of a MAR, MTAR or MSTAR model.

    Parameters
    ----------
    kind : {'mar', 'mtar', 'mstar'}
        Model kind.
    regime1 : CoefficientSet
        ``(A, B)``.
    regime2 : CoefficientSet | None
        ``(C, D)``, required for MTAR and MSTAR.
    transition : TransitionFunction | None
        Indicator for MTAR, logistic for MSTAR.
    noise : MatrixNormalSpec | None
        Distribution of ``E_t``. Defaults to standard isotropic noise.
    source : TransitionSource
        How ``s_t`` is produced when simulating.
    noise_regime2 : MatrixNormalSpec | None
        MTAR only: noise used when ``s_t >= c``. Defaults to ``noise``.
    """
    kind: str
    regime1: CoefficientSet
    regime2: CoefficientSet = None
    transition: TransitionFunction = None
    noise: MatrixNormalSpec = None
    source: TransitionSource = TransitionSource()
    noise_regime2: MatrixNormalSpec = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ModelValidityError(
                f"kind should be in {MODEL_KINDS}. Got '{self.kind}'."
            )
        if self.kind == 'mar':
            if self.regime2 is not None or self.transition is not None:
                raise ModelValidityError(
                    "A MAR model has no second regime and no transition."
                )
        else:
            if self.regime2 is None or self.transition is None:
                raise ModelValidityError(
                    f"A {self.kind.upper()} model needs a second regime and "
                    "a transition function."
                )
            expected = 'indicator' if self.kind == 'mtar' else 'logistic'
            if self.transition.kind != expected:
                raise ModelValidityError(
                    f"A {self.kind.upper()} model needs a {expected} "
                    f"transition. Got '{self.transition.kind}'."
                )
            if self.regime2.dims != self.regime1.dims:
                raise ModelValidityError(
                    f"Regime dimensions differ: {self.regime1.dims} and "
                    f"{self.regime2.dims}."
                )
        m, n = self.regime1.dims
        if self.noise is None:
            object.__setattr__(self, 'noise', MatrixNormalSpec.isotropic(m, n))
        for noise in [self.noise, self.noise_regime2]:
            if noise is not None and tuple(noise.dims) != (m, n):
                raise ModelValidityError(
                    f"Noise dimensions {noise.dims} do not match ({m}, {n})."
                )
        if self.noise_regime2 is not None and self.kind != 'mtar':
            raise ModelValidityError(
                "Only MTAR models carry a regime-specific noise."
            )

    @property
    def dims(self):
        return self.regime1.dims

    @property
    def regimes(self):
        if self.regime2 is None:
            return (self.regime1,)
        return (self.regime1, self.regime2)

    def replace(self, **kwargs):
        params = dict(
            kind=self.kind, regime1=self.regime1, regime2=self.regime2,
            transition=self.transition, noise=self.noise, source=self.source,
            noise_regime2=self.noise_regime2
        )
        params.update(kwargs)
        return ModelSpec(**params)

    def weights(self, s):
        "Regime-2 weights ``g(s_t)`` (zeros for a MAR model)."
        if self.transition is None:
            return np.zeros_like(np.asarray(s, dtype=np.float64))
        return np.asarray(eval_transition(self.transition, s))


def _check_frame(model, Y):
    Y = np.asarray(Y, dtype=np.float64)
    if Y.shape[-2:] != tuple(model.dims):
        raise ValueError(
            f"Frame of shape {Y.shape[-2:]} does not match the model "
            f"dimensions {model.dims}."
        )
    return Y


def conditional_mean(model, y_prev, s=None):
    """Conditional mean ``E[Y_t | Y_{t-1} = y_prev, s_t = s]``.

    ``y_prev`` can be a single frame or a stack of frames with ``s`` an
    array of the same length.
    """
    y_prev = _check_frame(model, y_prev)
    mean = model.regime1.apply(y_prev)
    if model.kind == 'mar':
        return mean
    if s is None:
        raise ValueError(
            f"A {model.kind.upper()} model needs the transition value s."
        )
    g = np.asarray(model.weights(s))
    if y_prev.ndim == 3:
        g = g[:, None, None]
    second = model.regime2.apply(y_prev)
    if model.kind == 'mtar':
        return np.where(g > 0, second, mean)
    return mean + g * second


def check_stationarity(model):
    """Check ``ρ(A) ρ(B) < 1`` (and ``ρ(C) ρ(D) < 1``) for every regime.

    Returns
    -------
    stationary : bool
        Whether every regime product is strictly below one.
    radii : list of float
        The per-regime products ``ρ(left) ρ(right)``.
    """
    radii = [regime.radius() for regime in model.regimes]
    return all(r < 1 for r in radii), radii


def _transition_values(model, T, frames=None, transition=None):
    source = model.source
    if source.kind == 'trend':
        return np.arange(1, T + 1) / T
    if source.kind == 'exogenous':
        if transition is None:
            raise ValueError(
                "An exogenous transition source needs the values of s_t."
            )
        transition = np.asarray(transition, dtype=np.float64).reshape(-1)
        if transition.shape[0] != T:
            raise ValueError(
                f"The exogenous transition has length {transition.shape[0]}"
                f", expected {T}."
            )
        return transition
    return None


def simulate_path(model, T, burn_in=None, seed=None, y0=None,
                  transition=None, allow_nonstationary=False):
    """Simulate a sample path ``Y_1, ..., Y_T`` of the model.

    The recursion ``Y_t = conditional_mean(Y_{t-1}, s_t) + E_t`` starts from
    ``Y_0 = y0`` (zero matrix by default). For stationary transition
    sources the first ``burn_in`` frames are discarded.

    Parameters
    ----------
    model : ModelSpec
        Data generating process.
    T : int
        Number of frames returned, ``T >= 2``.
    burn_in : int | None
        Frames discarded before the returned sample. Defaults to 100 for
        lagged and exogenous sources and 0 for the trend, for which a
        positive value is rejected.
    seed : int | Generator | None
        Seed of the noise generator.
    y0 : array-like, shape (m, n) | None
        Initial frame.
    transition : array-like, shape (burn_in + T,) | None
        Values of ``s_t`` for an exogenous source.
    allow_nonstationary : bool
        Simulate even if ``check_stationarity`` fails.

    Returns
    -------
    series : MatrixSeries
        The simulated frames and their transition variable.
    """
    T = check_positive_int(T, "T", minimum=2)
    stationary, radii = check_stationarity(model)
    if not stationary and not allow_nonstationary:
        raise ModelValidityError(
            "The model is not stationary: the spectral radius products "
            f"{radii} should all be < 1 (stationarity condition "
            "ρ(A)ρ(B) < 1 and ρ(C)ρ(D) < 1). Use allow_nonstationary "
            "to simulate anyway."
        )
    if model.source.kind == 'trend':
        if burn_in:
            raise ValueError(
                "burn_in should be 0 with a trend transition, as s_t = t/T "
                "is tied to the sample index."
            )
        burn_in = 0
    elif burn_in is None:
        burn_in = DEFAULT_BURN_IN
    burn_in = check_positive_int(burn_in, "burn_in", minimum=0)

    rng = check_random_state(seed)
    m, n = model.dims
    n_total = burn_in + T
    s = _transition_values(model, n_total, transition=transition)

    # Draw every innovation upfront, so the stream of random numbers does
    # not depend on the regimes visited.
    noise = sample_matrix_normal(model.noise, rng, size=n_total)
    noise2 = None
    if model.noise_regime2 is not None:
        noise2 = sample_matrix_normal(model.noise_regime2, rng, size=n_total)

    frames = np.empty((n_total, m, n))
    s_path = np.empty(n_total) if s is None else s
    y_prev = np.zeros((m, n)) if y0 is None else as_matrix(y0, "y0")
    y_init = y_prev
    source = model.source
    for t in range(n_total):
        if s is None:
            k = t - source.lag
            lagged = frames[k] if k >= 0 else y_init
            s_path[t] = lagged[source.row, source.col]
        s_t = s_path[t]
        e_t = noise[t]
        if noise2 is not None and model.weights(s_t) > 0:
            e_t = noise2[t]
        y_prev = conditional_mean(model, y_prev, s_t) + e_t
        frames[t] = y_prev

    if not np.all(np.isfinite(frames)):
        warnings.warn("The simulated path contains non-finite values.")
    return MatrixSeries(
        frames[burn_in:], s_path[burn_in:],
        metadata={'seed': seed if isinstance(seed, int) else None,
                  'burn_in': burn_in}
    )


def residuals(model, series):
    """Residuals ``Y_t - conditional_mean(Y_{t-1}, s_t)`` for ``t = 2..T``.

    Returns
    -------
    residuals : MatrixSeries
        Series of length ``T - 1``.
    """
    Y, X, s = series.lagged_pairs()
    if model.kind != 'mar' and s is None:
        raise ValueError(
            f"A {model.kind.upper()} model needs a transition variable in "
            "the series."
        )
    E = Y - conditional_mean(model, X, s)
    return MatrixSeries(E, None if s is None else s,
                        series.row_labels, series.col_labels)


def one_step_forecast(model, series, s_next=None):
    """One-step conditional-mean forecast ``E[Y_{T+1} | Y_T, s_{T+1}]``."""
    if series.T == 0:
        raise ValueError("Cannot forecast an empty series.")
    return conditional_mean(model, series.frames[-1], s_next)


def attach_transition(series, source):
    """Return ``series`` with the transition variable produced by ``source``.

    The trend gives ``s_t = t / T``. A lagged entry gives
    ``s_t = Y_{t-lag}[row, col]``: the first ``lag - 1`` frames are dropped so
    that ``s_t`` is observed for every lagged pair, and ``s_1``, which no
    regression uses, repeats ``s_2``. Exogenous sources keep the transition
    stored in the series.
    """
    if source.kind == 'exogenous':
        if series.transition is None:
            raise ValueError(
                "An exogenous transition source needs the series to carry "
                "the values of s_t."
            )
        return series
    if source.kind == 'trend':
        return series.with_transition(np.arange(1, series.T + 1) / series.T)

    m, n = series.dims
    if not (0 <= source.row < m and 0 <= source.col < n):
        raise ValueError(
            f"The lagged entry ({source.row}, {source.col}) is out of the "
            f"({m}, {n}) frames."
        )
    frames = series.frames[source.lag - 1:]
    if frames.shape[0] < 2:
        raise ValueError(
            f"The series is too short for a transition lagged by "
            f"{source.lag}."
        )
    s = np.empty(frames.shape[0])
    s[1:] = series.frames[:series.T - source.lag, source.row, source.col]
    s[0] = s[1]
    return MatrixSeries(frames, s, series.row_labels, series.col_labels,
                        dict(series.metadata))

from dataclasses import dataclass, field, replace

import numpy as np

from ..models import ModelSpec
from ..models import CoefficientSet
from ..models import TransitionSource
from ..tensor import as_matrix, frobenius_norm
from ..exceptions import RankConditionError
from ..utils.checkers import check_random_state
from ..stopping_criterion import EPS, MAX_SWEEPS
from ..stopping_criterion import RelativeDescentCriterion

INIT_STRATEGIES = ('default', 'uniform')

# Upper bounds of the uniform initializations of B and of C, D.
UNIFORM_RIGHT_HIGH = 0.2
UNIFORM_REGIME2_HIGH = 0.5


@dataclass
class IlsOptions:
    """Options of the iterative least squares estimators.

    Parameters
    ----------
    max_sweeps : int
        Maximal number of alternating sweeps of each fit.
    rel_tol : float
        Stop when the relative change of SSQ between two sweeps is below.
    init : {'default', 'uniform'}
        Default starts from ``B0 = 0.2 I`` and ``C0 = D0 = 0.5 I``. Uniform
        draws ``B0`` entries in ``U(0, 0.2)`` and ``C0, D0`` entries in
        ``U(0, 0.5)`` with ``seed``.
    init_right : array-like, shape (n, n) | None
        Explicit ``B0``, overrides ``init``.
    init_regime2 : CoefficientSet | None
        Explicit ``(C0, D0)`` for MSTAR, overrides ``init``.
    grid_max_sweeps : int | None
        Maximal number of sweeps of the fits run on each grid point.
        Defaults to ``max_sweeps``.
    n_jobs : int | None
        Number of joblib workers for the grid evaluations. Defaults to the
        ``n_jobs`` setting.
    seed : int | None
        Seed of the uniform initialization.
    """
    max_sweeps: int = MAX_SWEEPS
    rel_tol: float = EPS
    init: str = 'default'
    init_right: np.ndarray = None
    init_regime2: CoefficientSet = None
    grid_max_sweeps: int = None
    n_jobs: int = None
    seed: int = 0

    def __post_init__(self):
        if self.init not in INIT_STRATEGIES:
            raise ValueError(
                f"init should be in {INIT_STRATEGIES}. Got '{self.init}'."
            )
        if self.max_sweeps < 1:
            raise ValueError(
                f"max_sweeps should be >= 1. Got {self.max_sweeps}."
            )

    def criterion(self, grid=False):
        max_sweeps = self.max_sweeps
        if grid and self.grid_max_sweeps is not None:
            max_sweeps = self.grid_max_sweeps
        return RelativeDescentCriterion(rel_tol=self.rel_tol,
                                        max_sweeps=max_sweeps)

    def initial_right(self, n):
        if self.init_right is not None:
            B0 = as_matrix(self.init_right, "init_right")
            if B0.shape != (n, n):
                raise ValueError(
                    f"init_right should have shape ({n}, {n}). "
                    f"Got {B0.shape}."
                )
            return B0
        if self.init == 'uniform':
            rng = check_random_state(self.seed)
            return rng.uniform(0, UNIFORM_RIGHT_HIGH, size=(n, n))
        return UNIFORM_RIGHT_HIGH * np.eye(n)

    def initial_regime2(self, m, n):
        if self.init_regime2 is not None:
            if self.init_regime2.dims != (m, n):
                raise ValueError(
                    f"init_regime2 should have dims ({m}, {n}). "
                    f"Got {self.init_regime2.dims}."
                )
            return self.init_regime2
        if self.init == 'uniform':
            # Offset the stream so that B0 and (C0, D0) are independent.
            rng = check_random_state(self.seed)
            rng.uniform(size=(n, n))
            return CoefficientSet(
                rng.uniform(0, UNIFORM_REGIME2_HIGH, size=(m, m)),
                rng.uniform(0, UNIFORM_REGIME2_HIGH, size=(n, n)),
            )
        return CoefficientSet(UNIFORM_REGIME2_HIGH * np.eye(m),
                              UNIFORM_REGIME2_HIGH * np.eye(n))


@dataclass
class FitResult:
    """Result of an estimator.

    ``grid_profile`` lists ``(c, SSQ)`` for MTAR and ``(γ, c, SSQ)`` for
    MSTAR, with ``None`` for skipped candidates. ``pvalues`` is filled by
    ``coefficient_inference``.
    """
    model: ModelSpec
    ssq: float
    sweeps_used: int
    converged: bool
    status: str = 'done'
    ssq_trace: list = field(default_factory=list)
    grid_profile: list = None
    pvalues: dict = None
    n_obs: int = None
    diagnostics: dict = field(default_factory=dict)
    transition_source: TransitionSource = None

    @property
    def kind(self):
        return self.model.kind

    @property
    def c_hat(self):
        if self.model.transition is None:
            return None
        return self.model.transition.c

    @property
    def gamma_hat(self):
        if self.model.transition is None:
            return None
        return self.model.transition.gamma

    @property
    def n_params(self):
        """Free parameters: ``m² + n² - 1`` per regime, plus the transition.

        MTAR adds ``c`` and MSTAR adds ``(γ, c)``.
        """
        m, n = self.model.dims
        n_regimes = len(self.model.regimes)
        extra = {'mar': 0, 'mtar': 1, 'mstar': 2}[self.kind]
        return n_regimes * (m * m + n * n - 1) + extra


def normalize_coefficients(coefs):
    """Rescale ``(A, B)`` so that ``‖A‖_F = 1`` and the first nonzero entry
    of ``vec(A)`` is positive. ``kron(B, A)`` is unchanged.
    """
    A, B = coefs.left, coefs.right
    norm = frobenius_norm(A)
    if norm == 0:
        raise RankConditionError(
            "Cannot normalize a zero left coefficient: the factors are not "
            "identified."
        )
    vec_A = A.reshape(-1, order='F')
    sign = 1.0 if vec_A[np.flatnonzero(vec_A)[0]] > 0 else -1.0
    return CoefficientSet(sign * A / norm, sign * norm * B)


def normalize_identification(fit):
    """Return a copy of ``fit`` with every regime normalized.

    The normalization is idempotent and preserves the Kronecker products of
    the regimes.
    """
    model = fit.model
    regime1 = normalize_coefficients(model.regime1)
    regime2 = None
    if model.regime2 is not None:
        regime2 = normalize_coefficients(model.regime2)
    return replace(fit, model=model.replace(regime1=regime1, regime2=regime2))

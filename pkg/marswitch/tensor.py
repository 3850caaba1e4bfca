"""Dense matrix primitives shared by every model of marswitch.

Matrices are plain ``numpy`` arrays of ``float64``. They are stored in
column-major (Fortran) order so that :func:`vec` is a reinterpretation of
the underlying memory. A series of ``T`` frames of shape ``(m, n)`` is kept
as a single array of shape ``(T, m, n)`` inside :class:`MatrixSeries`.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .utils.checkers import check_random_state

SYMMETRY_TOL = 1e-12


def as_matrix(M, name="matrix"):
    """Validate ``M`` and return it as a finite 2D float array.

    Parameters
    ----------
    M : array-like, shape (rows, cols)
        Input matrix.
    name : str
        Name used in the error messages.

    Returns
    -------
    M : ndarray, shape (rows, cols)
        Column-major copy of the input.
    """
    M = np.array(M, dtype=np.float64, order='F', ndmin=2)
    if M.ndim != 2:
        raise ValueError(f"{name} should be 2D. Got shape {M.shape}.")
    if M.size == 0:
        raise ValueError(f"{name} should have positive dimensions.")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries.")
    return M


def vec(M):
    """Stack the columns of ``M`` into a vector of length ``m * n``."""
    M = np.asarray(M, dtype=np.float64)
    return M.reshape(-1, order='F')


def unvec(v, m, n):
    """Inverse of :func:`vec`: reshape a vector into an ``(m, n)`` matrix."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] != m * n:
        raise ValueError(
            f"Cannot unvec a vector of shape {v.shape} into a {m}x{n} matrix."
        )
    return v.reshape((m, n), order='F')


def kron(L, R):
    """Kronecker product ``L ⊗ R``: block ``(i, j)`` equals ``L[i, j] * R``.

    With this convention ``vec(A @ Y @ B.T) == kron(B, A) @ vec(Y)``.
    """
    return np.asfortranarray(np.kron(L, R))


def spectral_radius(M):
    """Largest modulus among the eigenvalues of the square matrix ``M``."""
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"spectral_radius needs a square matrix. "
                         f"Got shape {M.shape}.")
    try:
        eigvals = linalg.eigvals(M, check_finite=False)
    except linalg.LinAlgError as e:
        raise RuntimeError(
            f"Eigenvalue solver did not converge for a {M.shape} matrix: {e}"
        ) from e
    return float(np.max(np.abs(eigvals)))


def frobenius_norm(M):
    return float(np.linalg.norm(np.asarray(M, dtype=np.float64), 'fro'))


def _check_covariance(S, name):
    S = as_matrix(S, name)
    if S.shape[0] != S.shape[1]:
        raise ValueError(f"{name} should be square. Got shape {S.shape}.")
    if np.max(np.abs(S - S.T)) > SYMMETRY_TOL:
        raise ValueError(f"{name} should be symmetric.")
    # An all-zero covariance is accepted as the degenerate, noiseless case.
    if np.any(S != 0) and np.min(linalg.eigvalsh(S)) <= 0:
        raise ValueError(f"{name} should be positive definite.")
    return S


def _cholesky(S, name):
    if not np.any(S != 0):
        return np.zeros_like(S)
    try:
        return linalg.cholesky(S, lower=True)
    except linalg.LinAlgError as e:
        raise ValueError(f"Cholesky factorization of {name} failed: {e}")


@dataclass(frozen=True, eq=False)
class MatrixNormalSpec:
    """Matrix normal distribution ``MN(mean, sigma_r, sigma_c)``.

    ``vec(X - mean)`` is Gaussian with covariance ``kron(sigma_c, sigma_r)``.

    Parameters
    ----------
    mean : array-like, shape (m, n)
        Mean matrix.
    sigma_r : array-like, shape (m, m)
        Row-wise covariance, symmetric positive definite (or all zeros).
    sigma_c : array-like, shape (n, n)
        Column-wise covariance, symmetric positive definite (or all zeros).
    """
    mean: np.ndarray
    sigma_r: np.ndarray
    sigma_c: np.ndarray

    def __post_init__(self):
        mean = as_matrix(self.mean, "mean")
        sigma_r = _check_covariance(self.sigma_r, "sigma_r")
        sigma_c = _check_covariance(self.sigma_c, "sigma_c")
        m, n = mean.shape
        if sigma_r.shape != (m, m) or sigma_c.shape != (n, n):
            raise ValueError(
                f"Covariances of shapes {sigma_r.shape} and {sigma_c.shape} "
                f"do not match a {m}x{n} mean."
            )
        object.__setattr__(self, 'mean', mean)
        object.__setattr__(self, 'sigma_r', sigma_r)
        object.__setattr__(self, 'sigma_c', sigma_c)

    @classmethod
    def isotropic(cls, m, n, scale=1.0):
        "Zero-mean noise with covariance ``scale * I_mn``."
        return cls(np.zeros((m, n)), scale * np.eye(m), np.eye(n))

    @property
    def dims(self):
        return self.mean.shape

    @property
    def is_degenerate(self):
        return not (np.any(self.sigma_r != 0) and np.any(self.sigma_c != 0))

    def covariance(self):
        "Covariance ``kron(sigma_c, sigma_r)`` of ``vec(X)``."
        return kron(self.sigma_c, self.sigma_r)

    def cholesky_factors(self):
        return (_cholesky(self.sigma_r, "sigma_r"),
                _cholesky(self.sigma_c, "sigma_c"))


def sample_matrix_normal(spec, rng=None, size=None):
    """Draw from a matrix normal distribution.

    The draw is ``mean + Lr @ Z @ Lc.T`` with ``Lr``, ``Lc`` the lower
    Cholesky factors of ``sigma_r`` and ``sigma_c`` and ``Z`` i.i.d.
    standard normal, which avoids forming the ``mn x mn`` covariance.

    Parameters
    ----------
    spec : MatrixNormalSpec
        Distribution to sample from.
    rng : None | int | Generator
        Seed or generator. Each task should own its generator.
    size : int | None
        If given, return ``size`` independent draws stacked on axis 0.

    Returns
    -------
    X : ndarray, shape (m, n) or (size, m, n)
    """
    rng = check_random_state(rng)
    m, n = spec.dims
    Lr, Lc = spec.cholesky_factors()
    if size is None:
        Z = rng.standard_normal((m, n))
        return np.asfortranarray(spec.mean + Lr @ Z @ Lc.T)
    Z = rng.standard_normal((size, m, n))
    return spec.mean[None] + Lr[None] @ Z @ Lc.T[None]


@dataclass(frozen=True, eq=False)
class MatrixSeries:
    """Ordered sequence of ``T`` real ``(m, n)`` frames.

    Parameters
    ----------
    frames : array-like, shape (T, m, n)
        The observed matrices ``Y_1, ..., Y_T``.
    transition : array-like, shape (T,) | None
        Transition variable ``s_t`` aligned with the frames.
    row_labels, col_labels : tuple of str | None
        Labels of the rows and columns, used by the file formats. Default
        to ``r1..rm`` and ``c1..cn``.
    """
    frames: np.ndarray
    transition: np.ndarray = None
    row_labels: tuple = None
    col_labels: tuple = None
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        frames = np.array(self.frames, dtype=np.float64)
        if frames.ndim == 2:
            frames = frames[None]
        if frames.ndim != 3 or frames.shape[0] == 0:
            raise ValueError(
                f"frames should have shape (T, m, n). Got {frames.shape}."
            )
        if not np.all(np.isfinite(frames)):
            raise ValueError("frames contain non-finite entries.")
        frames.setflags(write=False)
        object.__setattr__(self, 'frames', frames)

        T, m, n = frames.shape
        if self.transition is not None:
            s = np.array(self.transition, dtype=np.float64).reshape(-1)
            if s.shape[0] != T:
                raise ValueError(
                    f"transition has length {s.shape[0]}, expected {T}."
                )
            if not np.all(np.isfinite(s)):
                raise ValueError("transition contains non-finite entries.")
            s.setflags(write=False)
            object.__setattr__(self, 'transition', s)

        row_labels = self.row_labels or tuple(f"r{i + 1}" for i in range(m))
        col_labels = self.col_labels or tuple(f"c{j + 1}" for j in range(n))
        if len(row_labels) != m or len(col_labels) != n:
            raise ValueError("Labels do not match the frame dimensions.")
        object.__setattr__(self, 'row_labels', tuple(row_labels))
        object.__setattr__(self, 'col_labels', tuple(col_labels))

    @property
    def T(self):
        return self.frames.shape[0]

    @property
    def dims(self):
        return self.frames.shape[1:]

    def __len__(self):
        return self.T

    def with_transition(self, transition):
        "Return a copy of the series with another transition variable."
        return MatrixSeries(self.frames, transition, self.row_labels,
                            self.col_labels, dict(self.metadata))

    def vectorized(self):
        "Return the ``(T, m * n)`` array whose rows are ``vec(Y_t)``."
        T = self.T
        return self.frames.transpose(0, 2, 1).reshape(T, -1)

    def lagged_pairs(self):
        """Return ``(Y_t, Y_{t-1}, s_t)`` for ``t = 2..T``.

        ``s_t`` is None when the series has no transition variable.
        """
        s = None if self.transition is None else self.transition[1:]
        return self.frames[1:], self.frames[:-1], s


def standardize_series(series):
    """Standardize every entry series to mean 0 and standard deviation 1.

    The standard deviation uses the ``T - 1`` denominator. Constant entry
    series are mapped to zeros.
    """
    if series.T < 2:
        raise ValueError("standardize_series needs at least 2 frames.")
    Y = series.frames
    mean = Y.mean(axis=0)
    std = Y.std(axis=0, ddof=1)
    centered = Y - mean[None]
    scale = np.where(std > 0, std, 1.0)
    out = np.where(std[None] > 0, centered / scale[None], 0.0)
    return MatrixSeries(out, series.transition, series.row_labels,
                        series.col_labels, dict(series.metadata))


def sample_lag_cov(series, h):
    """Moment estimate of ``Σ(h) = E[Y_{t+h} ⊗ Y_t']``.

    Returns the ``(m n) x (n m)`` average of ``kron(Y_{t+h}, Y_t.T)`` over
    ``t = 1..T-h``. Only ``h >= 0`` is supported.
    """
    T = series.T
    if not 0 <= h < T:
        raise ValueError(f"Lag h={h} should be in [0, {T}).")
    m, n = series.dims
    Y = series.frames
    lead, lag = Y[h:], Y[:T - h].transpose(0, 2, 1)
    cov = np.einsum('tij,tab->iajb', lead, lag) / (T - h)
    return cov.reshape(m * n, n * m)

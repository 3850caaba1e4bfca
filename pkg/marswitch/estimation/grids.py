"""Candidate grids for the threshold ``c`` and the slope ``γ``."""
from dataclasses import dataclass

import numpy as np

from ..config import get_setting

N_PERCENTILES = 99
N_GAMMA = 24
N_THRESHOLD = 25
GAMMA_RANGE = (1.0, 50.0)


def _check_trim(trim_q):
    if trim_q is None:
        trim_q = get_setting('default_trim')
    if not 0 <= trim_q < 0.5:
        raise ValueError(f"trim_q should be in [0, 0.5). Got {trim_q}.")
    return float(trim_q)


def _check_values(values, name):
    values = np.unique(np.asarray(values, dtype=np.float64).reshape(-1))
    if values.size == 0 or not np.all(np.isfinite(values)):
        raise ValueError(f"{name} should be a non-empty list of finite "
                         "values.")
    return values


def trimmed_range(s, trim_q):
    """Return the ``trim_q`` and ``1 - trim_q`` empirical quantiles of s."""
    s = np.asarray(s, dtype=np.float64)
    if s.size == 0:
        raise ValueError("Cannot build a grid from an empty transition.")
    lo, hi = np.quantile(s, [trim_q, 1 - trim_q])
    return float(lo), float(hi)


@dataclass(frozen=True)
class ThresholdGrid:
    """Candidate thresholds for the indicator transition.

    Parameters
    ----------
    trim_q : float | None
        Share of the observations of ``s_t`` trimmed on each side. Defaults
        to the ``default_trim`` setting.
    dense : bool
        If True, every observed value of ``s_t`` inside the trimmed range is
        a candidate. Otherwise, the percentiles of ``s_t`` are used.
    values : tuple of float | None
        Explicit candidates, used as given.
    """
    trim_q: float = None
    dense: bool = False
    values: tuple = None

    def candidates(self, s):
        """Sorted candidate thresholds for the transition values ``s``.

        The percentiles are snapped to observed values of ``s``, so that each
        candidate splits the sample at an observation.
        """
        if self.values is not None:
            return _check_values(self.values, "values")
        trim_q = _check_trim(self.trim_q)
        s = np.asarray(s, dtype=np.float64)
        lo, hi = trimmed_range(s, trim_q)
        if self.dense:
            candidates = s
        else:
            probs = np.arange(1, N_PERCENTILES + 1) / (N_PERCENTILES + 1)
            candidates = np.quantile(s, probs, method='inverted_cdf')
        candidates = np.unique(candidates)
        return candidates[(candidates >= lo) & (candidates <= hi)]


@dataclass(frozen=True)
class SlopeThresholdGrid:
    """Candidate ``(γ, c)`` pairs for the logistic transition.

    Parameters
    ----------
    gamma_values : tuple of float | None
        Slope candidates, all > 0. Defaults to 24 log-spaced values between
        1 and 50.
    c_values : tuple of float | None
        Threshold candidates. Defaults to 25 equispaced values over the
        trimmed range of ``s_t``.
    trim_q : float | None
        Trimming used for the default thresholds.
    """
    gamma_values: tuple = None
    c_values: tuple = None
    trim_q: float = None

    def gammas(self):
        if self.gamma_values is None:
            return np.geomspace(*GAMMA_RANGE, N_GAMMA)
        gammas = _check_values(self.gamma_values, "gamma_values")
        if np.any(gammas <= 0):
            raise ValueError("gamma_values should all be > 0.")
        return gammas

    def thresholds(self, s):
        if self.c_values is not None:
            return _check_values(self.c_values, "c_values")
        lo, hi = trimmed_range(s, _check_trim(self.trim_q))
        return np.unique(np.linspace(lo, hi, N_THRESHOLD))

    def candidates(self, s):
        "List of ``(gamma, c)`` pairs, ``c`` varying fastest."
        return [(float(gamma), float(c))
                for gamma in self.gammas() for c in self.thresholds(s)]

    def envelope(self, s):
        "Bounds ``((γ_min, γ_max), (c_min, c_max))`` of the grid."
        gammas, thresholds = self.gammas(), self.thresholds(s)
        return ((float(gammas[0]), float(gammas[-1])),
                (float(thresholds[0]), float(thresholds[-1])))

    def search_bounds(self, s):
        """Bounds of the local search refining ``(γ, c)``.

        ``γ`` stays in the grid envelope and ``c`` in the union of the grid
        envelope and the trimmed range of ``s``.
        """
        gamma_bounds, (c_lo, c_hi) = self.envelope(s)
        s_lo, s_hi = trimmed_range(s, _check_trim(self.trim_q))
        return gamma_bounds, (min(c_lo, s_lo), max(c_hi, s_hi))

"""Gini coefficient and Lorenz curve over non-negative observations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


def _observations(values) -> np.ndarray:
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise InputError("at least one observation is required")
    if not np.all(np.isfinite(x)):
        raise InputError("observations must be finite")
    if np.any(x < 0):
        raise InputError("observations must be non-negative")
    if x.sum() <= 0:
        raise InputError("mean of the observations is zero; the Gini coefficient is undefined")
    return x


def gini(values) -> float:
    """Population Gini coefficient ``sum_ij |x_i - x_j| / (2 n^2 mean)``.

    Evaluated through the sorted form ``sum_k (2k - n - 1) x_(k) / (n sum x)``,
    which equals the pairwise double sum exactly for discrete data.

    Raises:
        InputError: empty input, negative or non-finite values, or all zeros.
    """
    x = np.sort(_observations(values))
    n = x.size
    weights = 2.0 * np.arange(1, n + 1) - n - 1.0
    # shares first: a lone nonzero value then gives (n - 1)/n exactly
    g = float(np.dot(weights, x / x.sum()) / n)
    return max(g, 0.0)


def gini_snr(snr_values) -> float:
    """Gini coefficient of SNR observations given in linear scale."""
    return gini(snr_values)


def db_to_linear(db) -> np.ndarray:
    """Convert dB values to linear power ratios before averaging them."""
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class LorenzCurve:
    population: np.ndarray  # cumulative share of the sample, 0..1
    share: np.ndarray  # cumulative share of the variable, 0..1

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.population.tolist(), self.share.tolist()))


def lorenz(values) -> LorenzCurve:
    x = np.sort(_observations(values))
    n = x.size
    population = np.arange(n + 1) / n
    share = np.concatenate(([0.0], np.cumsum(x) / x.sum()))
    share[-1] = 1.0
    return LorenzCurve(population, share)


def gini_from_lorenz(curve: LorenzCurve) -> float:
    """Gini as the area ratio ``A / (A + B)`` with ``B`` the trapezoidal
    area under the Lorenz curve and ``A + B = 1/2``."""
    xs = np.asarray(curve.population, dtype=float)
    ys = np.asarray(curve.share, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 2:
        raise InputError("Lorenz curve needs matching 1-D coordinate arrays with >= 2 points")
    if xs[0] != 0 or ys[0] != 0 or xs[-1] != 1 or ys[-1] != 1:
        raise InputError("Lorenz curve must start at (0, 0) and end at (1, 1)")
    if np.any(np.diff(xs) < 0) or np.any(np.diff(ys) < 0):
        raise InputError("Lorenz curve coordinates must be non-decreasing")
    if np.any(ys > xs + 1e-12):
        raise InputError("Lorenz curve must lie on or below the diagonal")
    area_under = float(np.sum(np.diff(xs) * (ys[1:] + ys[:-1])) / 2.0)
    return max((0.5 - area_under) / 0.5, 0.0)

"""Signed power transform for real-valued cash flows, and standardization.

The transform is ``sign(y) * ((|y| + 1)**lam - 1) / lam`` (``sign(y) * log(|y| + 1)``
at ``lam == 0``). It is odd, strictly increasing, and the identity at ``lam == 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, DomainError, ValidationError

DEFAULT_LAMBDA_GRID = np.round(np.arange(-2.0, 2.0 + 1e-9, 0.05), 10)


def _forward(y, lam):
    y = np.asarray(y, float)
    log_mag = np.log1p(np.abs(y))
    if lam == 0:
        mag = log_mag
    else:
        mag = np.expm1(lam * log_mag) / lam
    return np.sign(y) * mag


def _inverse(z, lam):
    z = np.asarray(z, float)
    a = np.abs(z)
    if lam == 0:
        log_mag = a
    else:
        arg = lam * a
        if np.any(arg <= -1):
            raise DomainError(f"value out of range for lambda={lam}: |z| must be < {-1 / lam}")
        log_mag = np.log1p(arg) / lam
    return np.sign(z) * np.expm1(log_mag)


@dataclass(frozen=True)
class LambdaTransform:
    lam: float
    fitted_on_length: int = 0

    def __post_init__(self):
        if not np.isfinite(self.lam):
            raise ValidationError("lambda must be finite")

    def forward(self, y):
        out = _forward(y, self.lam)
        return float(out) if out.ndim == 0 else out

    def inverse(self, z):
        out = _inverse(z, self.lam)
        return float(out) if out.ndim == 0 else out

    def clip(self, z):
        """Pull transformed values inside the invertible range (only bounded for lam < 0)."""
        if self.lam >= 0:
            return z
        bound = -1.0 / self.lam * (1 - 1e-12)
        return np.clip(z, -bound, bound)


IDENTITY = LambdaTransform(1.0)


def forward(t, y):
    return t.forward(y)


def inverse(t, z):
    return t.inverse(z)


def log_likelihood(values, lam):
    """Profile Gaussian log-likelihood of the transformed values, Jacobian included."""
    y = np.sort(np.asarray(values, float))
    z = _forward(y, lam)
    var = np.mean((z - z.mean()) ** 2)
    if var <= 0:
        return -np.inf
    return -0.5 * len(y) * np.log(var) + (lam - 1.0) * np.sum(np.log1p(np.abs(y)))


def fit_lambda(values, grid=DEFAULT_LAMBDA_GRID):
    """Grid-search the lambda that makes ``values`` look most Gaussian."""
    y = np.asarray(values, float)
    grid = np.asarray(grid, float)
    if len(y) < 10:
        raise ValidationError(f"fit_lambda needs at least 10 values, got {len(y)}")
    if grid.size == 0:
        raise ValidationError("lambda grid is empty")
    if np.ptp(y) == 0:
        raise DegenerateError("cannot fit lambda to a constant series")
    scores = np.array([log_likelihood(y, lam) for lam in grid])
    best = np.max(scores)
    ties = grid[scores == best]
    lam = float(ties[np.argmin(np.abs(ties - 1.0))])
    return LambdaTransform(lam, len(y))


@dataclass(frozen=True)
class Standardizer:
    mean: float
    std_dev: float

    def __post_init__(self):
        if not self.std_dev > 0:
            raise ValidationError("std_dev must be positive")

    def apply(self, values):
        return (np.asarray(values, float) - self.mean) / self.std_dev

    def invert(self, values):
        return np.asarray(values, float) * self.std_dev + self.mean


def standardize(values):
    v = np.asarray(values, float)
    if len(v) < 2:
        raise ValidationError("standardize needs at least 2 values")
    sd = float(np.std(v, ddof=1))
    if sd == 0:
        raise DegenerateError("cannot standardize a constant vector")
    s = Standardizer(float(v.mean()), sd)
    return s, s.apply(v)

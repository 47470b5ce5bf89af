"""Autoregressive forecaster on the power-transformed series, order chosen by AIC."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateError, ValidationError
from ..transform import DEFAULT_LAMBDA_GRID, LambdaTransform, fit_lambda
from .base import Family, ForecastModel, TrainingSummary


@dataclass(frozen=True)
class ARParams:
    order_p: int
    coefficients: tuple  # beta_0 (intercept) then beta_1..beta_p
    lambda_transform: LambdaTransform
    aic: float
    center: float = 0.0  # mean of the transformed training series

    def __post_init__(self):
        if len(self.coefficients) != self.order_p + 1:
            raise ValidationError("AR needs order_p + 1 coefficients")

    @property
    def n_parameters(self):
        return self.order_p + 1


def default_max_order(n):
    return max(0, min(int(math.floor(10 * math.log10(n))), n - 10))


def _lag_matrix(x, p, start):
    """Rows for targets x[start:], columns [1, x_{t-1}, ..., x_{t-p}]."""
    n = len(x)
    cols = [np.ones(n - start)]
    for k in range(1, p + 1):
        cols.append(x[start - k:n - k])
    return np.column_stack(cols)


def aic(rss, n, p):
    return n * math.log(rss / n) + 2 * (p + 1)


def fit_ar(train, max_p=None, lambda_grid=DEFAULT_LAMBDA_GRID, transform=None):
    """Fit AR(p) for p = 0..max_p on a common sample and keep the AIC minimizer.

    ``transform`` fixes the power transform instead of fitting it on ``train``.
    """
    y = np.asarray(train, float)
    if max_p is None:
        max_p = default_max_order(len(y))
    if max_p < 0:
        raise ValidationError("max_p must be non-negative")
    if len(y) < max_p + 10:
        raise ValidationError(f"AR with max_p={max_p} needs at least {max_p + 10} values, "
                              f"got {len(y)}")
    if np.ptp(y) == 0:
        raise DegenerateError("cannot fit an AR model to a constant series")
    t = transform if transform is not None else fit_lambda(y, lambda_grid)
    z = t.forward(y)
    center = float(z.mean())
    x = z - center

    target = x[max_p:]
    n_eff = len(target)
    best_p, best_aic = 0, math.inf
    for p in range(max_p + 1):
        A = _lag_matrix(x, p, max_p)[:, :p + 1]
        beta, *_ = np.linalg.lstsq(A, target, rcond=None)
        rss = float(np.sum((target - A @ beta) ** 2))
        if rss <= 0:
            score = -math.inf
        else:
            score = aic(rss, n_eff, p)
        if score < best_aic:
            best_p, best_aic = p, score

    A = _lag_matrix(x, best_p, best_p)
    beta, *_ = np.linalg.lstsq(A, x[best_p:], rcond=None)
    resid = x[best_p:] - A @ beta
    dof = max(len(resid) - best_p - 1, 1)
    params = ARParams(best_p, tuple(float(b) for b in beta), t, float(best_aic), center)
    summary = TrainingSummary(len(y), float(y.mean()), float(resid @ resid / dof))
    return ForecastModel(Family.AR, params, summary)


def predict_ar(model, recent, horizon):
    """Iterated multi-step forecasts, returned on the original scale."""
    prm = model.params
    p = prm.order_p
    if horizon < 1:
        raise ValidationError("horizon must be positive")
    recent = np.asarray(recent, float)
    if len(recent) < p:
        raise ValidationError(f"AR({p}) needs {p} recent values, got {len(recent)}")
    t = prm.lambda_transform
    beta = np.asarray(prm.coefficients)
    hist = list(t.forward(recent[len(recent) - p:]) - prm.center) if p else []
    out = np.empty(horizon)
    for h in range(horizon):
        nxt = beta[0] + sum(beta[k] * hist[-k] for k in range(1, p + 1))
        out[h] = nxt
        hist.append(nxt)
    return np.asarray(t.inverse(t.clip(out + prm.center)), float).reshape(horizon)

"""Ordinary least squares on calendar dummies and lagged values."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..errors import CollinearityError, ValidationError
from .base import Family, ForecastModel, TrainingSummary, check_width


@dataclass(frozen=True)
class RegressionParams:
    coefficients: tuple  # intercept first when present, then one per column
    intercept: bool = True

    @property
    def n_parameters(self):
        return len(self.coefficients)


def _with_intercept(values, intercept):
    if not intercept:
        return values
    return np.column_stack([np.ones(len(values)), values])


def numerical_rank(A):
    """Rank and pivot order from column-pivoted QR."""
    _, R, piv = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0:
        return 0, piv
    tol = max(A.shape) * np.finfo(float).eps * diag[0]
    return int(np.sum(diag > tol)), piv


def fit_regression(X, allow_rank_deficient=False):
    """Least-squares fit of ``X.target`` on ``X.values`` (plus intercept when flagged).

    A rank-deficient design raises unless ``allow_rank_deficient``; the minimum-norm
    solution is then used and flagged in the training summary.
    """
    names = (("intercept",) if X.intercept_included else ()) + tuple(X.columns)
    A = _with_intercept(X.values, X.intercept_included)
    if X.rows <= A.shape[1]:
        raise ValidationError(f"need more rows ({X.rows}) than coefficients ({A.shape[1]})")
    rank, piv = numerical_rank(A)
    deficient = rank < A.shape[1]
    if deficient and not allow_rank_deficient:
        raise CollinearityError(names[piv[rank]])
    beta, *_ = np.linalg.lstsq(A, X.target, rcond=None)
    resid = X.target - A @ beta
    dof = max(X.rows - rank, 1)
    params = RegressionParams(tuple(float(b) for b in beta), X.intercept_included)
    summary = TrainingSummary(X.rows, float(X.target.mean()), float(resid @ resid / dof),
                              deficient)
    return ForecastModel(Family.REGRESSION, params, summary, columns=tuple(X.columns))


def predict_regression(model, X_new):
    X_new = check_width(model, X_new)
    A = _with_intercept(X_new, model.params.intercept)
    return A @ np.asarray(model.params.coefficients)

"""Gaussian radial-basis-function network with k-medoids centres.

Lagged cash flows are power-transformed and standardized before clustering; the
target is modelled on the same scale and mapped back after prediction. Calendar
dummy columns enter unscaled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import ValidationError
from ..transform import (DEFAULT_LAMBDA_GRID, LambdaTransform, Standardizer, fit_lambda,
                         standardize)
from .base import Family, ForecastModel, TrainingSummary, check_width
from .kmedoids import fit_kmedoids


@dataclass(frozen=True)
class RBFParams:
    cluster_count: int
    alpha: float
    medoids: np.ndarray   # K x d, on the scaled input space
    rho: np.ndarray       # mean member-to-medoid distance per cluster (zeros replaced)
    weights: np.ndarray   # b_0 .. b_K
    standardizer: Standardizer
    lambda_transform: LambdaTransform
    lag_mask: np.ndarray  # which input columns hold lagged cash flows

    @property
    def n_parameters(self):
        return self.cluster_count + 1


def activation(distance, alpha, rho):
    """exp(-distance**2 / (alpha * rho))"""
    distance = np.asarray(distance, float)
    return np.exp(-distance ** 2 / (alpha * np.asarray(rho, float)))


def _scale_inputs(values, lag_mask, t, st):
    F = np.array(values, float, copy=True)
    if lag_mask.any():
        F[:, lag_mask] = st.apply(t.forward(F[:, lag_mask]))
    return F


def design(F, medoids, alpha, rho):
    """Leading column of ones, then one Gaussian activation per medoid."""
    phi = activation(cdist(F, medoids), alpha, rho[None, :])
    return np.column_stack([np.ones(len(F)), phi])


def fit_rbf(X, K, alpha, seed=0, lambda_grid=DEFAULT_LAMBDA_GRID, transform=None,
            n_init=1):
    """Fit the network on design matrix ``X`` (raw cash-flow scale).

    ``transform`` fixes the power transform; ``None`` fits it on the target.
    """
    if K < 1 or alpha <= 0:
        raise ValidationError("K must be >= 1 and alpha > 0")
    if X.rows < K + 1:
        raise ValidationError(f"RBF with K={K} needs at least {K + 1} rows, got {X.rows}")
    t = transform if transform is not None else fit_lambda(X.target, lambda_grid)
    st, target = standardize(t.forward(X.target))
    lag_mask = np.array([c.startswith("lag_") for c in X.columns], dtype=bool)
    F = _scale_inputs(X.values, lag_mask, t, st)

    clustering = fit_kmedoids(F, K, seed=seed, n_init=n_init)
    medoids = F[clustering.medoids]
    dist = cdist(F, medoids)
    rho = np.array([dist[clustering.labels == k, k].mean() for k in range(K)])
    positive = rho[rho > 0]
    floor = positive.min() if positive.size else 1.0
    rho = np.where(rho > 0, rho, floor)

    Phi = np.column_stack([np.ones(len(F)), activation(dist, alpha, rho[None, :])])
    weights, _, rank, _ = np.linalg.lstsq(Phi, target, rcond=None)
    resid = target - Phi @ weights
    params = RBFParams(K, float(alpha), medoids, rho, weights, st, t, lag_mask)
    summary = TrainingSummary(X.rows, float(X.target.mean()),
                              float(resid @ resid / max(X.rows - rank, 1)),
                              bool(rank < Phi.shape[1]))
    return ForecastModel(Family.RBF, params, summary, columns=tuple(X.columns))


def predict_rbf(model, X_new):
    X_new = check_width(model, X_new)
    prm = model.params
    F = _scale_inputs(X_new, prm.lag_mask, prm.lambda_transform, prm.standardizer)
    scaled = design(F, prm.medoids, prm.alpha, prm.rho) @ prm.weights
    t = prm.lambda_transform
    return np.asarray(t.inverse(t.clip(prm.standardizer.invert(scaled))), float).reshape(len(F))

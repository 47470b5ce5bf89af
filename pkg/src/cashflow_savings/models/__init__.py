"""Forecaster families under one fit/forecast contract."""

from .ar import ARParams, fit_ar, predict_ar
from .base import Family, ForecastModel, TrainingSummary
from .forest import ForestParams, Tree, fit_random_forest, predict_forest
from .kmedoids import Clustering, fit_kmedoids
from .mean import MeanParams, fit_mean
from .rbf import RBFParams, activation, fit_rbf, predict_rbf
from .regression import RegressionParams, fit_regression, predict_regression
from .serialize import dumps, from_dict, loads, to_dict
from .spec import ModelSpec, expand_grid, fixed_lambda_for

__all__ = [
    "ARParams", "Clustering", "Family", "ForecastModel", "ForestParams", "MeanParams",
    "ModelSpec", "RBFParams", "RegressionParams", "TrainingSummary", "Tree", "activation",
    "dumps", "expand_grid", "fit_ar", "fit_kmedoids", "fit_mean", "fit_random_forest",
    "fit_rbf", "fit_regression", "fixed_lambda_for", "from_dict", "loads", "predict_ar",
    "predict_forest", "predict_rbf", "predict_regression", "to_dict",
]

"""Model specification: family + feature set + hyperparameters, fit on a series window."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import ValidationError
from ..timeseries import FeatureSpec, build_features
from ..transform import LambdaTransform, fit_lambda
from .ar import fit_ar
from .base import Family
from .forest import fit_random_forest
from .mean import fit_mean
from .rbf import fit_rbf
from .regression import fit_regression

HYPERPARAMETERS = {
    Family.MEAN: {},
    Family.AR: {"max_p": None, "lambda_value": None},
    Family.REGRESSION: {"allow_rank_deficient": True},
    Family.RBF: {"K": 10, "alpha": 10, "lambda_value": None, "n_init": 1},
    Family.RANDOM_FOREST: {"a": 20, "b": None, "c": 50},
}

_LABELS = {Family.MEAN: "MEAN", Family.AR: "AR", Family.REGRESSION: "REG",
           Family.RBF: "RBF", Family.RANDOM_FOREST: "RF"}


@dataclass(frozen=True)
class ModelSpec:
    family: Family
    features: FeatureSpec = field(default_factory=FeatureSpec)
    hyper: dict = field(default_factory=dict)

    def __post_init__(self):
        family = Family.parse(self.family)
        object.__setattr__(self, "family", family)
        allowed = HYPERPARAMETERS[family]
        unknown = set(self.hyper) - set(allowed)
        if unknown:
            raise ValidationError(f"unknown hyperparameter(s) for {family.value}: "
                                  f"{sorted(unknown)}")
        merged = dict(allowed)
        merged.update(self.hyper)
        object.__setattr__(self, "hyper", merged)
        if family in (Family.REGRESSION, Family.RBF, Family.RANDOM_FOREST):
            if not self.features.has_calendar and self.features.lag_count == 0:
                raise ValidationError(f"{family.value} needs at least one explanatory variable")

    @property
    def label(self):
        return _LABELS[self.family]

    def describe_parameters(self):
        h = self.hyper
        if self.family is Family.AR:
            return "p coefficients (AIC)" if h["max_p"] is None else f"p<={h['max_p']} (AIC)"
        if self.family is Family.RBF:
            return f"K={h['K']}, alpha={h['alpha']}"
        if self.family is Family.RANDOM_FOREST:
            return f"a={h['a']}, b={h['b'] or 'all'}, c={h['c']}"
        if self.family is Family.REGRESSION:
            return "OLS"
        return "-"

    def describe_inputs(self):
        if self.family is Family.AR:
            return "p past values"
        if self.family is Family.MEAN:
            return "-"
        return self.features.describe()

    def with_transform(self, lam):
        """Copy with a fixed power-transform parameter (global fit)."""
        if "lambda_value" not in self.hyper:
            return self
        return replace(self, hyper={**self.hyper, "lambda_value": lam})

    def fit(self, window, seed=0):
        """Fit on a :class:`CashFlowSeries` window."""
        h = self.hyper
        y = window.amounts
        if self.family is Family.MEAN:
            return fit_mean(y)
        fixed = LambdaTransform(h["lambda_value"]) if h.get("lambda_value") is not None else None
        if self.family is Family.AR:
            return fit_ar(y, h["max_p"], transform=fixed)
        X = build_features(window, self.features)
        if self.family is Family.REGRESSION:
            model = fit_regression(X, allow_rank_deficient=h["allow_rank_deficient"])
        elif self.family is Family.RBF:
            model = fit_rbf(X, int(h["K"]), h["alpha"], seed=seed, transform=fixed,
                            n_init=int(h["n_init"]))
        else:
            b = h["b"] if h["b"] is not None else len(X.columns)
            model = fit_random_forest(X, int(h["a"]), min(int(b), len(X.columns)), int(h["c"]),
                                      seed=seed)
        return replace(model, features=self.features)


def expand_grid(family, features, grid):
    """One :class:`ModelSpec` per combination of the listed hyperparameter values."""
    keys = sorted(grid)
    values = [v if isinstance(v, (list, tuple)) else [v] for v in (grid[k] for k in keys)]
    return [ModelSpec(family, features, dict(zip(keys, combo)))
            for combo in itertools.product(*values)]


def minimum_training_rows(spec):
    """Smallest window length the family can be fit on."""
    f = spec.features
    h = spec.hyper
    if spec.family is Family.MEAN:
        return 1
    if spec.family is Family.AR:
        return (h["max_p"] or 0) + 10
    if spec.family is Family.RBF:
        return f.lag_count + int(h["K"]) + 1
    return f.lag_count + 2


def fixed_lambda_for(spec, values):
    """Pin the power transform to one fitted on ``values`` (global instead of per window)."""
    if "lambda_value" not in spec.hyper or spec.hyper["lambda_value"] is not None:
        return spec
    return spec.with_transform(fit_lambda(np.asarray(values, float)).lam)

"""Common fitted-model record and the forecasting contract shared by all families."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ValidationError
from ..timeseries import FeatureSpec, feature_rows


class Family(str, enum.Enum):
    MEAN = "mean"
    AR = "ar"
    REGRESSION = "regression"
    RBF = "rbf"
    RANDOM_FOREST = "random_forest"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("-", "_").replace(" ", "_")
        aliases = {"rf": "random_forest", "reg": "regression", "naive": "mean"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValidationError(f"unknown model family {value!r}; expected one of "
                                  f"{[m.value for m in cls]}") from None


@dataclass(frozen=True)
class TrainingSummary:
    n_train: int
    train_mean: float
    residual_variance: float
    rank_deficient: bool = False


@dataclass(frozen=True)
class ForecastModel:
    family: Family
    params: object
    training_summary: TrainingSummary
    features: Optional[FeatureSpec] = None
    columns: tuple = ()

    @property
    def history_needed(self):
        if self.family is Family.AR:
            return self.params.order_p
        if self.features is not None:
            return self.features.lag_count
        return 0

    @property
    def n_parameters(self):
        return self.params.n_parameters

    def predict_rows(self, X):
        """Predictions for explicit feature rows (regression, RBF, forest)."""
        from . import forest, rbf, regression

        fn = {Family.REGRESSION: regression.predict_regression,
              Family.RBF: rbf.predict_rbf,
              Family.RANDOM_FOREST: forest.predict_forest}.get(self.family)
        if fn is None:
            raise ValidationError(f"{self.family.value} models do not take feature rows")
        return fn(self, X)

    def forecast(self, recent, future_dates):
        """Forecast the days in ``future_dates`` given the observed ``recent`` values.

        Lagged inputs beyond the first step are fed from earlier predictions.
        """
        from . import ar

        future_dates = np.asarray(future_dates, "datetime64[D]")
        horizon = len(future_dates)
        if self.family is Family.MEAN:
            return np.full(horizon, self.params.mean)
        if self.family is Family.AR:
            return ar.predict_ar(self, recent, horizon)
        p = self.features.lag_count
        if p == 0:
            return self.predict_rows(feature_rows(future_dates, None, self.features, self.columns))
        recent = np.asarray(recent, float)
        if len(recent) < p:
            raise ValidationError(f"need {p} recent values, got {len(recent)}")
        buf = list(recent[-p:][::-1])
        out = np.empty(horizon)
        for h in range(horizon):
            row = feature_rows(future_dates[h:h + 1], [buf[:p]], self.features, self.columns)
            out[h] = self.predict_rows(row)[0]
            buf.insert(0, out[h])
        return out


def check_width(model, X):
    X = np.atleast_2d(np.asarray(X, float))
    if X.shape[1] != len(model.columns):
        raise ValidationError(f"expected {len(model.columns)} feature columns, got {X.shape[1]}")
    return X

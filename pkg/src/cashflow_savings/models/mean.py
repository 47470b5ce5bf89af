"""Naive benchmark: the training mean at every horizon."""

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .base import Family, ForecastModel, TrainingSummary


@dataclass(frozen=True)
class MeanParams:
    mean: float
    n_parameters: int = 1


def fit_mean(train):
    y = np.asarray(train, float)
    if y.size == 0:
        raise ValidationError("cannot fit the mean of an empty training set")
    m = float(y.mean())
    var = float(np.mean((y - m) ** 2))
    return ForecastModel(Family.MEAN, MeanParams(m), TrainingSummary(len(y), m, var))

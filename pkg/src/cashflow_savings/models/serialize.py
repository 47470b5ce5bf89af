"""Text (JSON) serialization of fitted models.

Layout, version 1::

    {"format": "cashflow-savings-model", "version": 1,
     "family": "...", "columns": [...], "features": {...} | null,
     "training_summary": {...}, "params": {...family specific...}}

Arrays are stored as nested lists; floats round-trip exactly through ``repr``.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from ..errors import ValidationError
from ..timeseries import FeatureSpec
from ..transform import LambdaTransform, Standardizer
from .ar import ARParams
from .base import Family, ForecastModel, TrainingSummary
from .forest import ForestParams, Tree
from .mean import MeanParams
from .rbf import RBFParams
from .regression import RegressionParams

FORMAT = "cashflow-savings-model"
VERSION = 1


def _params_to_dict(family, p):
    if family is Family.MEAN:
        return {"mean": p.mean}
    if family is Family.AR:
        return {"order_p": p.order_p, "coefficients": list(p.coefficients),
                "lambda": p.lambda_transform.lam, "aic": p.aic, "center": p.center}
    if family is Family.REGRESSION:
        return {"coefficients": list(p.coefficients), "intercept": p.intercept}
    if family is Family.RBF:
        return {"K": p.cluster_count, "alpha": p.alpha, "medoids": p.medoids.tolist(),
                "rho": p.rho.tolist(), "weights": p.weights.tolist(),
                "standardizer": [p.standardizer.mean, p.standardizer.std_dev],
                "lambda": p.lambda_transform.lam, "lag_mask": p.lag_mask.tolist()}
    return {"a": p.tree_count, "b": p.mtry, "c": p.node_size, "seed": p.seed,
            "trees": [{f.name: getattr(t, f.name).tolist() for f in dataclasses.fields(Tree)}
                      for t in p.trees]}


def _params_from_dict(family, d):
    if family is Family.MEAN:
        return MeanParams(d["mean"])
    if family is Family.AR:
        return ARParams(d["order_p"], tuple(d["coefficients"]), LambdaTransform(d["lambda"]),
                        d["aic"], d["center"])
    if family is Family.REGRESSION:
        return RegressionParams(tuple(d["coefficients"]), d["intercept"])
    if family is Family.RBF:
        return RBFParams(d["K"], d["alpha"], np.array(d["medoids"], float),
                         np.array(d["rho"], float), np.array(d["weights"], float),
                         Standardizer(*d["standardizer"]), LambdaTransform(d["lambda"]),
                         np.array(d["lag_mask"], bool))
    trees = tuple(Tree(np.array(t["feature"], int), np.array(t["threshold"], float),
                       np.array(t["left"], int), np.array(t["right"], int),
                       np.array(t["value"], float), np.array(t["n_samples"], int))
                  for t in d["trees"])
    return ForestParams(d["a"], d["b"], d["c"], trees, d["seed"])


def to_dict(model):
    return {
        "format": FORMAT,
        "version": VERSION,
        "family": model.family.value,
        "columns": list(model.columns),
        "features": dataclasses.asdict(model.features) if model.features else None,
        "training_summary": dataclasses.asdict(model.training_summary),
        "params": _params_to_dict(model.family, model.params),
    }


def from_dict(d):
    if d.get("format") != FORMAT:
        raise ValidationError("not a serialized forecast model")
    if d.get("version") != VERSION:
        raise ValidationError(f"unsupported model format version {d.get('version')}")
    family = Family.parse(d["family"])
    features = FeatureSpec(**d["features"]) if d["features"] else None
    return ForecastModel(family, _params_from_dict(family, d["params"]),
                         TrainingSummary(**d["training_summary"]), features,
                         tuple(d["columns"]))


def dumps(model):
    return json.dumps(to_dict(model), indent=1, sort_keys=True)


def loads(text):
    return from_dict(json.loads(text))

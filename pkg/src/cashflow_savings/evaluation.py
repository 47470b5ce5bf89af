"""Error ratio against the training-mean benchmark, and time-series cross-validation."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, ValidationError
from .models.base import Family

log = logging.getLogger(__name__)

FIXED_ORIGIN = "FixedOrigin"
ROLLING_ORIGIN = "RollingOrigin"


def error_ratio(forecasts, actuals, train_mean):
    """Squared forecast error over squared error of the training mean.

    ``train_mean`` may be a scalar or one value per test point.
    """
    f = np.asarray(forecasts, float)
    a = np.asarray(actuals, float)
    if f.shape != a.shape or f.size == 0:
        raise ValidationError("forecasts and actuals must be non-empty and equally long")
    den = float(np.sum((np.broadcast_to(train_mean, a.shape) - a) ** 2))
    if den == 0:
        raise DegenerateError("actuals equal the training mean everywhere")
    return float(np.sum((f - a) ** 2)) / den


def folds(T, g, h, fixed_origin=True):
    """1-based ``(train_first, train_last, test)`` triples for horizon ``h``."""
    return [(1 if fixed_origin else i, g + i - 1, g + h + i - 1)
            for i in range(1, T - g - h + 2)]


@dataclass(frozen=True)
class EvaluationReport:
    per_horizon_epsilon: np.ndarray
    fold_counts: np.ndarray
    method: str
    g: int
    H: int
    label: str = ""
    inputs: str = ""
    parameters: str = ""

    @property
    def mean_epsilon(self):
        return float(np.mean(self.per_horizon_epsilon))

    @property
    def std_epsilon(self):
        """Standard deviation of the per-horizon ratios across horizons."""
        eps = self.per_horizon_epsilon
        return float(np.std(eps, ddof=1)) if len(eps) > 1 else 0.0

    def horizon_rows(self):
        rows = [(h, repr(float(e))) for h, e in enumerate(self.per_horizon_epsilon, start=1)]
        rows.append(("mean", repr(self.mean_epsilon)))
        return rows

    def summary_row(self):
        return [self.label, self.inputs, self.parameters, f"{self.mean_epsilon:.6f}",
                f"{self.std_epsilon:.6f}"]

    def write_csv(self, path, header=None):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            if header:
                fh.write(f"# {header}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["h", "epsilon"])
            w.writerows(self.horizon_rows())


SUMMARY_HEADER = ("model", "inputs", "parameters", "epsilon_bar", "stddev_over_h")


def cross_validate(series, spec, g, H, fixed_origin=True, stride=1, seed=0):
    """Backtest ``spec`` at every forecast origin and pool squared errors per horizon.

    Origin ``i`` trains on observations ``1..g+i-1`` (fixed origin) or ``i..g+i-1``
    (rolling origin) and forecasts up to ``H`` steps; the forecast ``h`` steps ahead
    is the test point of fold ``i`` for horizon ``h``. Each fold's benchmark mean is
    that fold's training-window mean.

    With ``stride > 1`` the model is refit only at every ``stride``-th origin and
    reused in between, forecasting from the current origin's history. The mean
    benchmark family is refit at every origin.
    """
    T = len(series)
    if g < 1 or H < 1 or stride < 1:
        raise ValidationError("g, H and stride must be positive")
    if T < g + H:
        raise ValidationError(f"cross-validation with g={g}, H={H} needs T >= {g + H}, got {T}")
    y = series.amounts
    num = np.zeros(H)
    den = np.zeros(H)
    count = np.zeros(H, dtype=int)
    model = None
    for i in range(1, T - g + 1):
        end = g + i - 1
        start = 0 if fixed_origin else i - 1
        window = series.window(start, end)
        if model is None or (i - 1) % stride == 0 or spec.family is Family.MEAN:
            model = spec.fit(window, seed=seed)
        steps = min(H, T - end)
        pred = model.forecast(window.amounts, series.dates[end:end + steps])
        actual = y[end:end + steps]
        ybar = float(window.amounts.mean())
        num[:steps] += (pred - actual) ** 2
        den[:steps] += (ybar - actual) ** 2
        count[:steps] += 1
    if np.any(den == 0):
        raise DegenerateError("test values equal the training mean for some horizon")
    method = FIXED_ORIGIN if fixed_origin else ROLLING_ORIGIN
    return EvaluationReport(num / den, count, method, g, H, spec.label,
                            spec.describe_inputs(), spec.describe_parameters())


def _r_squared(y, pred):
    tss = float(np.sum((y - y.mean()) ** 2))
    if tss == 0:
        raise DegenerateError("validation targets are constant")
    return 1.0 - float(np.sum((y - pred) ** 2)) / tss


def validation_score(series, spec, fraction=0.65, validation_share=0.2, seed=0):
    """R^2 of one-step-ahead predictions on the newest part of the oldest ``fraction``.

    Returns ``(r2, n_parameters)``.
    """
    n = int(round(fraction * len(series)))
    n_fit = int(round((1 - validation_share) * n))
    if n_fit < 2 or n - n_fit < 2:
        raise ValidationError("series too short for a validation split")
    model = spec.fit(series.window(0, n_fit), seed=seed)
    y = series.amounts
    if model.history_needed == 0:
        pred = model.forecast(y[:n_fit], series.dates[n_fit:n])
    else:
        pred = np.array([model.forecast(y[:t], series.dates[t:t + 1])[0]
                         for t in range(n_fit, n)])
    return _r_squared(y[n_fit:n], pred), model.n_parameters


def parameter_search(series, candidates, fraction=0.65, validation_share=0.2, seed=0):
    """Pick the candidate :class:`ModelSpec` with the highest validation R^2.

    Ties go to the candidate with fewer fitted parameters, then to grid order.
    Returns ``(best_spec, [(spec, r2 or None, n_parameters or None), ...])``.
    """
    candidates = list(candidates)
    if not candidates:
        raise ValidationError("candidate grid is empty")
    scored = []
    for spec in candidates:
        try:
            r2, k = validation_score(series, spec, fraction, validation_share, seed)
        except (DegenerateError, ValidationError) as exc:
            log.warning("candidate %s %s skipped: %s", spec.label, spec.hyper, exc)
            scored.append((spec, None, None))
            continue
        scored.append((spec, r2, k))
    valid = [(i, s) for i, s in enumerate(scored) if s[1] is not None]
    if not valid:
        raise DegenerateError("every candidate failed to fit or score")
    best = min(valid, key=lambda item: (-item[1][1], item[1][2], item[0]))
    return best[1][0], scored

"""Daily cash-flow series: loading, variant derivation, summaries and design matrices."""

from __future__ import annotations

import csv
import datetime as dt
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateError, ParseError, ValidationError

WEEKDAY_NAMES = ("Mon", "Tue", "Wed", "Thu", "Fri")


class Variant(str, enum.Enum):
    REAL = "Real"
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    RANDOM_SHOCK = "RandomShock"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for member in cls:
            if str(value).lower() == member.value.lower():
                return member
        raise ValidationError(f"unknown variant {value!r}; expected one of "
                              f"{[m.value for m in cls]}")


def _readonly(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CashFlowSeries:
    """Net cash flow per workday.

    ``history`` records the preprocessing steps applied so far, oldest first.
    """

    dates: np.ndarray
    amounts: np.ndarray
    variant: Variant = Variant.REAL
    applied_seed: Optional[int] = None
    history: tuple = ()

    def __post_init__(self):
        dates = _readonly(self.dates, "datetime64[D]")
        amounts = _readonly(self.amounts, float)
        if dates.ndim != 1 or dates.shape != amounts.shape:
            raise ValidationError("dates and amounts must be 1-D arrays of equal length")
        if len(dates) < 2:
            raise ValidationError(f"a series needs at least 2 observations, got {len(dates)}")
        if np.any(np.diff(dates) <= np.timedelta64(0, "D")):
            raise ValidationError("dates must be strictly increasing without duplicates")
        if not np.all(np.is_busday(dates)):
            bad = dates[~np.is_busday(dates)][0]
            raise ValidationError(f"{bad} is not a workday (Mon-Fri)")
        if not np.all(np.isfinite(amounts)):
            raise ValidationError("amounts must be finite")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "amounts", amounts)
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        object.__setattr__(self, "history", tuple(self.history))

    def __len__(self):
        return len(self.amounts)

    def window(self, start, stop):
        """Sub-series over 0-based positions ``[start, stop)``."""
        return CashFlowSeries(self.dates[start:stop], self.amounts[start:stop],
                              self.variant, self.applied_seed, self.history)


def workdays(start, n):
    """``n`` consecutive Mon-Fri dates beginning at the first workday on or after ``start``."""
    first = np.busday_offset(np.datetime64(start, "D"), 0, roll="forward")
    return np.busday_offset(first, np.arange(n), roll="forward")


def next_workdays(last, n):
    return np.busday_offset(np.datetime64(last, "D"), np.arange(1, n + 1), roll="forward")


def _parse_date(text):
    return np.datetime64(dt.date.fromisoformat(text.strip()), "D")


def load_series(path):
    """Read a ``date,amount`` CSV (header optional) into a sorted series."""
    rows = []
    first = True
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if not record or all(not f.strip() for f in record):
                continue
            if record[0].lstrip().startswith("#"):
                continue
            if len(record) != 2:
                raise ParseError(f"expected 2 fields 'date,amount', got {len(record)}", lineno)
            header, first = first and _is_header(record), False
            if header:
                continue
            try:
                date = _parse_date(record[0])
                amount = float(record[1])
            except ValueError as exc:
                raise ParseError(f"cannot parse {','.join(record)!r}: {exc}", lineno) from None
            rows.append((date, amount, lineno))
    if not rows:
        raise ValidationError(f"{path}: no observations")
    rows.sort(key=lambda r: r[0])
    for prev, cur in zip(rows, rows[1:]):
        if prev[0] == cur[0]:
            raise ValidationError(f"duplicate date {cur[0]} (lines {prev[2]} and {cur[2]})")
    dates = np.array([r[0] for r in rows], dtype="datetime64[D]")
    amounts = np.array([r[1] for r in rows], dtype=float)
    return CashFlowSeries(dates, amounts, Variant.REAL)


def _is_header(record):
    def parses(f, text):
        try:
            f(text)
        except ValueError:
            return False
        return True
    return not parses(_parse_date, record[0]) and not parses(float, record[1])


def write_series(series, path, header_comment=None):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "amount"])
        for d, a in zip(series.dates, series.amounts):
            w.writerow([str(d), repr(float(a))])


def derive_variant(series, variant, seed=None):
    """Derive one of the stress-test variants from ``series``.

    The standard deviation used for the caps is taken once from the input.
    A winsorizing step already present in ``series.history`` is not applied again.
    """
    variant = Variant.parse(variant)
    y = series.amounts
    sigma = float(np.std(y, ddof=1))
    step = {Variant.REAL: "cap5sd", Variant.STABLE: "cap3sd",
            Variant.UNSTABLE: "double3sd", Variant.RANDOM_SHOCK: "shock5pct"}[variant]

    if variant is Variant.RANDOM_SHOCK:
        if seed is None:
            raise ValidationError("RandomShock requires a seed")
        rng = np.random.default_rng(seed)
        n = len(y)
        k = int(math.floor(0.05 * n + 0.5))
        idx = rng.choice(n, size=k, replace=False)
        out = y.copy()
        out[idx] = rng.uniform(y.min(), y.max(), size=k)
        return CashFlowSeries(series.dates, out, variant, int(seed), series.history + (step,))

    if step in series.history:
        return series
    out = y.copy()
    if variant is Variant.REAL:
        mask = np.abs(y) > 5 * sigma
        out[mask] = np.sign(y[mask]) * 5 * sigma
    elif variant is Variant.STABLE:
        mask = np.abs(y) > 3 * sigma
        out[mask] = np.sign(y[mask]) * 3 * sigma
    else:
        mask = np.abs(y) > 3 * sigma
        out[mask] = 2 * y[mask]
    return CashFlowSeries(series.dates, out, variant, None, series.history + (step,))


@dataclass(frozen=True)
class Summary:
    length: int
    mean: float
    std_dev: float
    kurtosis: float

    def csv_row(self, dataset):
        return [dataset, self.length, repr(self.mean), repr(self.std_dev), repr(self.kurtosis)]


SUMMARY_HEADER = ("dataset", "length", "mean", "stddev", "kurtosis")


def summarize(series):
    y = np.asarray(series.amounts if isinstance(series, CashFlowSeries) else series, float)
    if len(y) < 4:
        raise ValidationError(f"summary needs at least 4 observations, got {len(y)}")
    centered = y - y.mean()
    m2 = np.mean(centered ** 2)
    if m2 == 0:
        raise DegenerateError("constant series: kurtosis undefined")
    m4 = np.mean(centered ** 4)
    return Summary(len(y), float(y.mean()), float(np.std(y, ddof=1)), float(m4 / m2 ** 2 - 3.0))


# -- explanatory variables ----------------------------------------------------------

@dataclass(frozen=True)
class FeatureSpec:
    use_day_of_month: bool = False
    use_day_of_week: bool = False
    use_month: bool = False
    use_week: bool = False
    lag_count: int = 0
    weekday_reference: int = 1  # 1 = Monday ... 5 = Friday
    categorical: bool = False
    intercept: bool = True

    def __post_init__(self):
        if self.lag_count < 0:
            raise ValidationError("lag_count must be non-negative")
        if not 1 <= self.weekday_reference <= 5:
            raise ValidationError("weekday_reference must be in 1..5")

    @property
    def has_calendar(self):
        return self.use_day_of_month or self.use_day_of_week or self.use_month or self.use_week

    def describe(self):
        parts = []
        if self.lag_count:
            parts.append(f"{self.lag_count} past values")
        for flag, name in ((self.use_day_of_month, "day-of-month"),
                           (self.use_day_of_week, "day-of-week"),
                           (self.use_month, "month"), (self.use_week, "week")):
            if flag:
                parts.append(name)
        return " + ".join(parts) or "none"


@dataclass(frozen=True)
class DesignMatrix:
    columns: tuple
    values: np.ndarray
    target: np.ndarray
    dates: np.ndarray = field(default=None)
    intercept_included: bool = True

    def __post_init__(self):
        if self.values.shape != (len(self.target), len(self.columns)):
            raise ValidationError("values must be rows x columns with one target per row")

    @property
    def rows(self):
        return len(self.target)

    def lag_columns(self):
        return [j for j, c in enumerate(self.columns) if c.startswith("lag_")]


def _calendar_block(dates, spec):
    days = np.asarray(dates, "datetime64[D]").astype(object)
    names, cols = [], []
    dom = np.array([d.day for d in days])
    dow = np.array([d.isoweekday() for d in days])
    mon = np.array([d.month for d in days])
    wk = np.array([d.isocalendar()[1] for d in days])
    groups = (
        (spec.use_day_of_month, "dom", dom, range(1, 32), 1),
        (spec.use_day_of_week, "dow", dow, range(1, 6), spec.weekday_reference),
        (spec.use_month, "month", mon, range(1, 13), 1),
        (spec.use_week, "week", wk, range(1, 54), 1),
    )
    for used, prefix, codes, levels, reference in groups:
        if not used:
            continue
        if spec.categorical:
            names.append(prefix)
            cols.append(codes.astype(float))
            continue
        for level in levels:
            if level == reference:
                continue
            names.append(f"{prefix}_{level}")
            cols.append((codes == level).astype(float))
    if not cols:
        return names, np.zeros((len(days), 0))
    return names, np.column_stack(cols)


def feature_rows(dates, lag_values, spec, columns):
    """Feature rows for ``dates`` restricted to a fitted model's ``columns``.

    ``lag_values[r, k]`` holds y_{t-k-1} for row ``r``.
    """
    names, block = _calendar_block(dates, spec)
    lookup = {n: block[:, j] for j, n in enumerate(names)}
    if spec.lag_count:
        lag_values = np.atleast_2d(np.asarray(lag_values, float))
        for k in range(spec.lag_count):
            lookup[f"lag_{k + 1}"] = lag_values[:, k]
    n = len(dates)
    out = np.empty((n, len(columns)))
    for j, c in enumerate(columns):
        out[:, j] = lookup[c]
    return out


def build_features(series, spec):
    """Design matrix of calendar dummies and lagged values, one row per predictable day."""
    if not spec.has_calendar and spec.lag_count == 0:
        raise ValidationError("feature spec selects no explanatory variables")
    y = series.amounts
    p = spec.lag_count
    if p >= len(y):
        raise ValidationError(f"lag_count {p} must be smaller than series length {len(y)}")
    dates = series.dates[p:]
    names, block = _calendar_block(dates, spec)
    parts = [block]
    if p:
        lags = np.column_stack([y[p - k - 1:len(y) - k - 1] for k in range(p)])
        parts.append(lags)
        names = names + [f"lag_{k + 1}" for k in range(p)]
    values = np.hstack(parts)
    keep = np.any(values != 0, axis=0)
    return DesignMatrix(tuple(n for n, k in zip(names, keep) if k), values[:, keep],
                        y[p:].copy(), dates, spec.intercept)


def synthetic_series(n, seed, start="2010-01-04", weekday_effect=(1.0, -0.5, 0.3, -1.2, 0.4),
                     day_of_month_effect=None, noise_share=0.3, scale=1e5):
    """Seeded workday series: calendar signal plus Gaussian noise.

    ``noise_share`` is the fraction of total variance due to the noise term.
    """
    rng = np.random.default_rng(seed)
    dates = workdays(start, n)
    days = dates.astype(object)
    signal = np.zeros(n)
    if weekday_effect is not None:
        signal += np.array([weekday_effect[d.weekday()] for d in days])
    if day_of_month_effect is not None:
        signal += np.array([day_of_month_effect[d.day - 1] for d in days])
    signal -= signal.mean()
    sv = signal.var()
    if sv > 0 and noise_share < 1:
        noise_sd = math.sqrt(sv * noise_share / (1 - noise_share))
    else:
        noise_sd = 1.0
    y = signal + rng.normal(0.0, noise_sd, n)
    return CashFlowSeries(dates, scale * y / y.std())


def as_series(values, start="2000-01-03"):
    values = np.asarray(values, float)
    return CashFlowSeries(workdays(start, len(values)), values)

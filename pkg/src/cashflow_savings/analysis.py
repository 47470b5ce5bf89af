"""Cost savings of a forecaster over the mean benchmark, and the accuracy-to-savings sweep."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .policy import (DEFAULT_SHORTAGE_BASIS, WORKDAYS_PER_YEAR, derive_parameters, total_costs,
                     trajectory)

log = logging.getLogger(__name__)

DEFAULT_RISK_LEVELS = (0.05, 0.10, 0.15)
DEFAULT_SIGMA_MULTIPLIERS = tuple(round(0.1 * k, 10) for k in range(16))


@dataclass(frozen=True)
class SavingsRecord:
    scenario: str
    group: str
    risk: float
    cost_candidate: float   # average daily cost
    cost_mean: float

    @property
    def saving_abs(self):
        return self.cost_mean - self.cost_candidate

    @property
    def saving_pct(self):
        if self.cost_mean <= 0:
            return float("nan")
        return 1.0 - self.cost_candidate / self.cost_mean

    def csv_row(self):
        return [self.scenario, f"{self.risk:g}"] + [
            repr(float(x)) for x in (self.cost_candidate, self.cost_mean, self.saving_abs,
                                     self.saving_pct)]


SAVINGS_HEADER = ("scenario", "risk", "cost_candidate", "cost_mean", "saving_abs", "saving_pct")


@dataclass(frozen=True)
class SavingsReport:
    records: tuple
    forecaster: str
    g: int
    H: int
    origins: int

    def group_records(self):
        """Records averaged over the structures of each scenario group."""
        out = []
        keys = []
        for r in self.records:
            if (r.group, r.risk) not in keys:
                keys.append((r.group, r.risk))
        for group, risk in keys:
            rs = [r for r in self.records if r.group == group and r.risk == risk]
            out.append(SavingsRecord(group, group, risk,
                                     float(np.mean([r.cost_candidate for r in rs])),
                                     float(np.mean([r.cost_mean for r in rs]))))
        return out

    def write_csv(self, path, header=None):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            if header:
                fh.write(f"# {header}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SAVINGS_HEADER)
            for r in list(self.records) + self.group_records():
                w.writerow(r.csv_row())


class _Comparison:
    """Origins, benchmark forecasts, policy limits and benchmark costs shared by
    every candidate evaluated on the same series."""

    def __init__(self, series, structures, g, H, risk_levels, stride, convention,
                 shortage_basis):
        T = len(series)
        if g < 1 or H < 1 or stride < 1:
            raise ValidationError("g, H and stride must be positive")
        if T < g + H:
            raise ValidationError(f"comparison with g={g}, H={H} needs T >= {g + H}, got {T}")
        if not structures:
            raise ValidationError("no cost structures")
        self.series = series
        self.structures = list(structures)
        self.g, self.H = g, H
        self.risks = tuple(risk_levels)
        self.convention, self.shortage_basis = convention, shortage_basis
        y = series.amounts
        # origin i trains on observations 1..g+i-1 and covers the next H days
        self.ends = [g + i - 1 for i in range(1, T - g - H + 2, stride)]
        self.means = [float(y[:e].mean()) for e in self.ends]
        self.params = [[derive_parameters(y[:e], r) for r in self.risks] for e in self.ends]
        self.mean_costs = self._costs(lambda k, e: np.full(H, self.means[k]))

    def _costs(self, forecast_for):
        """Summed cost per (risk, structure) over all origins."""
        y = self.series.amounts
        acc = np.zeros((len(self.risks), len(self.structures)))
        for k, e in enumerate(self.ends):
            fc = forecast_for(k, e)
            actual = y[e:e + self.H]
            for r, prm in enumerate(self.params[k]):
                transfers, balances = trajectory(actual, fc, prm)
                acc[r] += total_costs(transfers, balances, self.structures, self.convention,
                                      self.shortage_basis)
        return acc

    @property
    def days(self):
        return len(self.ends) * self.H

    def report(self, candidate_costs, label):
        records = []
        for r, risk in enumerate(self.risks):
            for j, c in enumerate(self.structures):
                records.append(SavingsRecord(c.name, c.scenario, risk,
                                             float(candidate_costs[r, j]) / self.days,
                                             float(self.mean_costs[r, j]) / self.days))
        return SavingsReport(tuple(records), label, self.g, self.H, len(self.ends))

    def epsilon(self, track):
        """Per-horizon error ratio of a horizon-independent forecast track."""
        y = self.series.amounts
        num = np.zeros(self.H)
        den = np.zeros(self.H)
        for k, e in enumerate(self.ends):
            actual = y[e:e + self.H]
            num += (track[e:e + self.H] - actual) ** 2
            den += (self.means[k] - actual) ** 2
        return num / den


def compare_savings(series, candidate, cost_structures, g, H, risk_levels=DEFAULT_RISK_LEVELS,
                    stride=1, seed=0, convention=WORKDAYS_PER_YEAR,
                    shortage_basis=DEFAULT_SHORTAGE_BASIS):
    """Average daily policy cost with ``candidate`` forecasts versus the training mean.

    ``candidate`` is a :class:`ModelSpec` refit at each origin on observations
    ``1..g+i-1``, or an array of forecasts aligned with ``series`` (used as-is for
    every origin). Each origin simulates the next ``H`` days from balance ``d``
    with limits derived from its training window. ``stride`` keeps every
    ``stride``-th origin.
    """
    cmp = _Comparison(series, cost_structures, g, H, risk_levels, stride, convention,
                      shortage_basis)
    if isinstance(candidate, np.ndarray) or isinstance(candidate, (list, tuple)):
        track = np.asarray(candidate, float)
        if track.shape != series.amounts.shape:
            raise ValidationError("forecast track must align with the series")
        costs = cmp._costs(lambda k, e: track[e:e + H])
        label = "forecast track"
    else:
        spec = candidate

        def forecast_for(k, e):
            model = spec.fit(series.window(0, e), seed=seed)
            return model.forecast(series.amounts[:e], series.dates[e:e + H])

        costs = cmp._costs(forecast_for)
        label = spec.label
    return cmp.report(costs, label)


def synthesize_forecasts(actuals, sigma, seed):
    """Actuals plus independent N(0, sigma) noise from a seeded generator."""
    y = np.asarray(actuals, float)
    if sigma < 0:
        raise ValidationError(f"sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return y.copy()
    return y + np.random.default_rng(seed).normal(0.0, sigma, y.shape)


@dataclass(frozen=True)
class SweepPoint:
    sigma: float
    epsilon_bar: float
    savings: dict          # risk level -> relative saving
    savings_abs: dict = field(default_factory=dict)   # risk level -> money per day
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValidationError("sigma must be non-negative")


def default_sigma_grid(series, g):
    sd = float(np.std(series.amounts[:g], ddof=1))
    return [m * sd for m in DEFAULT_SIGMA_MULTIPLIERS]


def accuracy_savings_sweep(series, sigma_grid, cost_structures, risk_levels=DEFAULT_RISK_LEVELS,
                           g=None, H=100, seed=0, stride=1, convention=WORKDAYS_PER_YEAR,
                           shortage_basis=DEFAULT_SHORTAGE_BASIS):
    """Savings of synthetic forecasts of increasing noise, against their error ratio.

    For grid entry ``k`` the test region (positions ``g`` onward) gets noise from
    seed ``seed + k``. The error ratio and the savings use the same origins.
    Savings per risk level pool the costs of all ``cost_structures``.
    """
    grid = [float(s) for s in sigma_grid]
    if not grid:
        raise ValidationError("sigma grid is empty")
    if any(s < 0 for s in grid):
        raise ValidationError("sigma grid must be non-negative")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValidationError("sigma grid must be sorted ascending")
    if g is None:
        g = int(round(0.65 * len(series)))
    cmp = _Comparison(series, cost_structures, g, H, risk_levels, stride, convention,
                      shortage_basis)
    y = series.amounts
    mean_total = cmp.mean_costs.sum(axis=1)
    points = []
    for k, sigma in enumerate(grid):
        track = y.copy()
        track[g:] = synthesize_forecasts(y[g:], sigma, seed + k)
        eps = cmp.epsilon(track)
        cand_total = cmp._costs(lambda _k, e: track[e:e + H]).sum(axis=1)
        n = len(cmp.structures) * cmp.days
        rel = {risk: float(1.0 - cand_total[r] / mean_total[r])
               for r, risk in enumerate(cmp.risks)}
        absolute = {risk: float((mean_total[r] - cand_total[r]) / n)
                    for r, risk in enumerate(cmp.risks)}
        points.append(SweepPoint(sigma, float(eps.mean()), rel, absolute, seed + k))
        log.info("sigma=%g epsilon_bar=%.4f savings=%s", sigma, eps.mean(), rel)
    return points


SWEEP_HEADER = ("sigma", "epsilon_bar", "risk", "savings_pct")


def sweep_rows(points):
    rows = []
    for p in points:
        for risk, s in p.savings.items():
            rows.append([repr(p.sigma), repr(p.epsilon_bar), f"{risk:g}", repr(s)])
    return rows


def write_sweep_csv(points, path, header=None):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        w.writerows(sweep_rows(points))


def sweep_figure(points, reference_lines=()):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    risks = list(points[0].savings)
    for risk in risks:
        xs = [p.epsilon_bar for p in points]
        ys = [100 * p.savings[risk] for p in points]
        ax.plot(xs, ys, marker="o", ms=3, label=f"MaxPct={risk:.0%}")
    for x, text in reference_lines:
        ax.axvline(x, color="grey", ls="--", lw=1)
        ax.annotate(text, (x, 1.0), xycoords=("data", "axes fraction"), rotation=90,
                    va="top", ha="right", fontsize=8)
    ax.set_xlabel("average error ratio")
    ax.set_ylabel("savings (%)")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return fig


def render_sweep(points, out_dir, reference_lines=(), header=None, plot=True):
    """Write ``sweep.csv`` and (optionally) ``sweep.svg`` into ``out_dir``.

    ``reference_lines`` holds ``(epsilon_bar, label)`` pairs drawn as vertical lines.
    """
    if len(points) < 2:
        raise ValidationError("need at least 2 sweep points to render")
    out_dir = Path(out_dir)
    csv_path = out_dir / "sweep.csv"
    write_sweep_csv(points, csv_path, header)
    paths = [csv_path]
    if plot:
        import matplotlib.pyplot as plt

        # fixed salt so element ids, and hence the file, repeat across runs
        with plt.rc_context({"svg.hashsalt": "sweep"}):
            fig = sweep_figure(points, reference_lines)
            svg = out_dir / "sweep.svg"
            fig.savefig(svg, format="svg",
                        metadata={"Date": None, "Description": header or None})
        plt.close(fig)
        paths.append(svg)
    return paths


def interpolate_savings(points, risk, epsilon_bar, absolute=True):
    """Savings at ``epsilon_bar`` by linear interpolation along the sweep curve."""
    xs = np.array([p.epsilon_bar for p in points])
    ys = np.array([(p.savings_abs if absolute else p.savings)[risk] for p in points])
    order = np.argsort(xs)
    return float(np.interp(epsilon_bar, xs[order], ys[order]))


def improvement_decision(points, current_epsilon, target_epsilon, improvement_cost):
    """Whether the extra daily saving of reaching ``target_epsilon`` beats its daily cost.

    One row per risk level: ``(risk, extra_saving_per_day, worthwhile)``.
    """
    rows = []
    for risk in points[0].savings:
        gain = (interpolate_savings(points, risk, target_epsilon)
                - interpolate_savings(points, risk, current_epsilon))
        rows.append((risk, gain, gain > improvement_cost))
    return rows

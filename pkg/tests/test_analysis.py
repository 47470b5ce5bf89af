import numpy as np
import pytest
from scipy.stats import spearmanr

from cashflow_savings.analysis import (SweepPoint, accuracy_savings_sweep, compare_savings,
                                       default_sigma_grid, improvement_decision,
                                       interpolate_savings, render_sweep, synthesize_forecasts)
from cashflow_savings.errors import ValidationError
from cashflow_savings.models import ModelSpec
from cashflow_savings.policy import cost_scenarios, derive_parameters, simulate
from cashflow_savings.timeseries import FeatureSpec, synthetic_series

STRUCTS = cost_scenarios(["most_likely"])[:4] + cost_scenarios(["variable_cost"])[:1]


def reference_comparison(series, spec, structures, g, H, risk):
    """Origin-by-origin comparison with one ledger per (origin, structure)."""
    y = series.amounts
    T = len(y)
    cand = np.zeros(len(structures))
    mean = np.zeros(len(structures))
    days = 0
    for i in range(1, T - g - H + 2):
        end = g + i - 1
        train = series.window(0, end)
        fc = spec.fit(train).forecast(train.amounts, series.dates[end:end + H])
        prm = derive_parameters(train.amounts, risk)
        actual = y[end:end + H]
        for j, c in enumerate(structures):
            cand[j] += simulate(actual, fc, prm, c).total
            mean[j] += simulate(actual, np.full(H, train.amounts.mean()), prm, c).total
        days += H
    return cand / days, mean / days


def test_compare_matches_reference_loop():
    s = synthetic_series(160, seed=1)
    spec = ModelSpec("regression", FeatureSpec(use_day_of_week=True))
    rep = compare_savings(s, spec, STRUCTS, 120, 10, risk_levels=(0.10,))
    cand, mean = reference_comparison(s, spec, STRUCTS, 120, 10, 0.10)
    np.testing.assert_allclose([r.cost_candidate for r in rep.records], cand, rtol=1e-10)
    np.testing.assert_allclose([r.cost_mean for r in rep.records], mean, rtol=1e-10)
    assert rep.origins == 160 - 120 - 10 + 1


def test_mean_candidate_saves_nothing():
    s = synthetic_series(200, seed=2)
    rep = compare_savings(s, ModelSpec("mean"), STRUCTS, 150, 20, stride=3)
    assert all(r.saving_abs == 0.0 and r.saving_pct == 0.0 for r in rep.records)


def test_identical_track_saves_nothing():
    s = synthetic_series(200, seed=2)
    y = s.amounts
    track = np.empty_like(y)
    for t in range(len(y)):
        track[t] = y[:max(t, 1)].mean()
    rep = compare_savings(s, track, STRUCTS, 150, 1)
    assert all(r.saving_abs == 0.0 for r in rep.records)


def test_perfect_forecasts_save():
    s = synthetic_series(600, seed=3)
    rep = compare_savings(s, s.amounts.copy(), cost_scenarios(), 390, 50, stride=5)
    assert all(r.saving_abs >= 0 for r in rep.records)
    assert all(r.saving_pct <= 1 for r in rep.records)


def test_compare_requires_data():
    s = synthetic_series(100, seed=0)
    with pytest.raises(ValidationError):
        compare_savings(s, ModelSpec("mean"), STRUCTS, 95, 10)
    with pytest.raises(ValidationError):
        compare_savings(s, np.zeros(5), STRUCTS, 50, 10)


def test_savings_csv(tmp_path):
    s = synthetic_series(200, seed=2)
    rep = compare_savings(s, s.amounts.copy(), cost_scenarios(), 150, 20, stride=5,
                          risk_levels=(0.05, 0.15))
    p = tmp_path / "savings.csv"
    rep.write_csv(p, "seed=0")
    lines = p.read_text().splitlines()
    assert lines[1] == "scenario,risk,cost_candidate,cost_mean,saving_abs,saving_pct"
    # 21 structures and 3 group averages per risk level
    assert len(lines) == 2 + 2 * 21 + 2 * 3
    assert "np." not in p.read_text()


def test_synthesize_forecasts():
    y = np.arange(10.0)
    np.testing.assert_array_equal(synthesize_forecasts(y, 0, seed=1), y)
    big = np.zeros(100_000)
    noisy = synthesize_forecasts(big, 1.0, seed=7)
    assert abs(noisy.mean()) < 0.02 and abs(noisy.std() - 1) < 0.02
    np.testing.assert_array_equal(noisy, synthesize_forecasts(big, 1.0, seed=7))
    with pytest.raises(ValidationError):
        synthesize_forecasts(y, -1, seed=0)


def test_sweep_endpoints_and_determinism():
    s = synthetic_series(800, seed=4)
    g = 520
    grid = default_sigma_grid(s, g)
    pts = accuracy_savings_sweep(s, grid, STRUCTS, g=g, H=30, stride=5, seed=3)
    assert pts[0].sigma == 0 and pts[0].epsilon_bar == 0.0
    assert pts[-1].epsilon_bar > 1
    again = accuracy_savings_sweep(s, grid, STRUCTS, g=g, H=30, stride=5, seed=3)
    assert [p.epsilon_bar for p in pts] == [p.epsilon_bar for p in again]
    assert [p.savings for p in pts] == [p.savings for p in again]
    assert all(v <= 1 for p in pts for v in p.savings.values())


def test_sweep_epsilon_rises_with_sigma():
    s = synthetic_series(900, seed=6)
    g = 585
    sd = np.std(s.amounts[:g], ddof=1)
    grid = list(np.linspace(0, 1.5, 20) * sd)
    pts = accuracy_savings_sweep(s, grid, STRUCTS, g=g, H=20, stride=5, seed=11)
    rho = spearmanr(grid, [p.epsilon_bar for p in pts])[0]
    assert rho >= 0.95


def test_sweep_grid_validation():
    s = synthetic_series(300, seed=0)
    for bad in ([], [1.0, 0.5], [-1.0]):
        with pytest.raises(ValidationError):
            accuracy_savings_sweep(s, bad, STRUCTS, g=200, H=10)
    with pytest.raises(ValidationError):
        SweepPoint(-1.0, 0.0, {})


def _points(n, risks):
    return [SweepPoint(float(k), 0.1 * k, {r: 0.5 - 0.01 * k * (1 + r) for r in risks},
                       {r: 100.0 - 5 * k for r in risks}) for k in range(n)]


def test_render_cardinality(tmp_path):
    paths = render_sweep(_points(2, [0.1]), tmp_path, header="seed=0")
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[1] == "sigma,epsilon_bar,risk,savings_pct" and len(lines) == 4
    assert [p.name for p in paths] == ["sweep.csv", "sweep.svg"]
    render_sweep(_points(10, [0.05, 0.1, 0.15]), tmp_path, reference_lines=[(0.68, "RF")])
    assert len((tmp_path / "sweep.csv").read_text().splitlines()) == 1 + 30
    svg = (tmp_path / "sweep.svg").read_text()
    assert svg.count("MaxPct=") == 3
    with pytest.raises(ValidationError):
        render_sweep(_points(1, [0.1]), tmp_path)


def test_render_unwritable(tmp_path):
    with pytest.raises(OSError):
        render_sweep(_points(3, [0.1]), tmp_path / "missing" / "dir", plot=False)


def test_improvement_decision():
    pts = _points(5, [0.1])
    assert interpolate_savings(pts, 0.1, 0.15) == pytest.approx(92.5)
    (risk, gain, ok), = improvement_decision(pts, 0.3, 0.1, improvement_cost=5.0)
    assert risk == 0.1 and gain == pytest.approx(10.0) and ok
    (_, _, ok), = improvement_decision(pts, 0.3, 0.1, improvement_cost=20.0)
    assert not ok

import numpy as np
import pytest

from cashflow_savings.errors import DegenerateError, ValidationError
from cashflow_savings.evaluation import (FIXED_ORIGIN, ROLLING_ORIGIN, cross_validate,
                                         error_ratio, folds, parameter_search,
                                         validation_score)
from cashflow_savings.models import ModelSpec, expand_grid
from cashflow_savings.timeseries import FeatureSpec, as_series, synthetic_series


def brute_force_cv(y, forecast_fn, g, H, fixed_origin=True):
    """Direct transcription of the backtest loop, one (h, i) pair at a time."""
    T = len(y)
    eps = []
    for h in range(1, H + 1):
        num = den = 0.0
        for i in range(1, T - g - h + 2):
            lo = 1 if fixed_origin else i
            train = y[lo - 1:g + i - 1]
            test_index = g + h + i - 1          # 1-based
            pred = forecast_fn(train, h)
            num += (pred - y[test_index - 1]) ** 2
            den += (train.mean() - y[test_index - 1]) ** 2
        eps.append(num / den)
    return np.array(eps)


def test_error_ratio_examples():
    a = np.array([1.0, 3.0])
    assert error_ratio(a, a, 2.0) == 0.0
    assert error_ratio([2.0, 2.0], a, 2.0) == 1.0
    assert error_ratio([1.5, 2.5], a, 2.0) == pytest.approx(0.25)
    with pytest.raises(DegenerateError):
        error_ratio([1.0, 1.0], [2.0, 2.0], 2.0)
    with pytest.raises(ValidationError):
        error_ratio([1.0], [1.0, 2.0], 0.0)


def test_error_ratio_scale_covariance():
    rng = np.random.default_rng(0)
    a = rng.normal(size=50)
    f = a + rng.normal(size=50)
    half = a + (f - a) / 2
    assert error_ratio(half, a, 0.3) == pytest.approx(error_ratio(f, a, 0.3) / 4)


def test_folds_index_arithmetic():
    fixed = folds(10, 6, 2)
    assert [f[2] for f in fixed] == [8, 9, 10]
    assert [(f[0], f[1]) for f in fixed] == [(1, 6), (1, 7), (1, 8)]
    rolling = folds(10, 6, 2, fixed_origin=False)
    assert [(f[0], f[1]) for f in rolling] == [(1, 6), (2, 7), (3, 8)]
    for h in range(1, 5):
        assert len(folds(30, 20, h)) == 30 - 20 - h + 1


@pytest.mark.parametrize("fixed_origin", [True, False])
def test_cross_validate_matches_brute_force(fixed_origin):
    s = synthetic_series(120, seed=1)
    spec = ModelSpec("ar", hyper={"max_p": 3, "lambda_value": 1.0})

    def fc(train, h):
        m = spec.fit(as_series(train))
        return m.forecast(train, np.arange(h))[h - 1]

    rep = cross_validate(s, spec, 80, 4, fixed_origin=fixed_origin)
    np.testing.assert_allclose(rep.per_horizon_epsilon,
                               brute_force_cv(s.amounts, fc, 80, 4, fixed_origin), rtol=1e-10)
    assert rep.fold_counts.tolist() == [40, 39, 38, 37]
    assert rep.method == (FIXED_ORIGIN if fixed_origin else ROLLING_ORIGIN)
    assert rep.mean_epsilon == pytest.approx(rep.per_horizon_epsilon.mean())


def test_mean_forecaster_is_exactly_one():
    s = synthetic_series(300, seed=2)
    rep = cross_validate(s, ModelSpec("mean"), 200, 10, stride=7)
    np.testing.assert_allclose(rep.per_horizon_epsilon, 1.0, rtol=0, atol=1e-12)


def test_single_fold_fixed_equals_rolling():
    # with H = 1 and g = T - 1 there is a single fold and the windows coincide
    s = synthetic_series(150, seed=3)
    spec = ModelSpec("regression", FeatureSpec(use_day_of_week=True))
    a = cross_validate(s, spec, 149, 1, fixed_origin=True)
    b = cross_validate(s, spec, 149, 1, fixed_origin=False)
    np.testing.assert_array_equal(a.per_horizon_epsilon, b.per_horizon_epsilon)


def test_cross_validate_requires_data():
    s = synthetic_series(50, seed=0)
    with pytest.raises(ValidationError, match="T >= 51"):
        cross_validate(s, ModelSpec("mean"), 41, 10)


def test_stride_reuses_fits_between_refits():
    s = synthetic_series(200, seed=4)
    spec = ModelSpec("regression", FeatureSpec(use_day_of_week=True))
    a = cross_validate(s, spec, 150, 5, stride=1)
    b = cross_validate(s, spec, 150, 5, stride=10)
    assert not np.array_equal(a.per_horizon_epsilon, b.per_horizon_epsilon)
    np.testing.assert_allclose(a.per_horizon_epsilon, b.per_horizon_epsilon, rtol=0.1)


def test_report_rendering(tmp_path):
    s = synthetic_series(120, seed=0)
    rep = cross_validate(s, ModelSpec("mean"), 100, 3)
    p = tmp_path / "cv.csv"
    rep.write_csv(p, "seed=0")
    lines = p.read_text().splitlines()
    assert lines[0] == "# seed=0" and lines[1] == "h,epsilon"
    assert lines[-1].startswith("mean,") and len(lines) == 2 + 3 + 1
    assert rep.summary_row()[:3] == ["MEAN", "-", "-"]
    assert rep.std_epsilon == pytest.approx(0.0, abs=1e-12)


def test_determinism():
    s = synthetic_series(200, seed=5)
    spec = ModelSpec("rf", FeatureSpec(use_day_of_week=True), {"a": 3, "c": 20})
    a = cross_validate(s, spec, 170, 3, stride=5, seed=2)
    b = cross_validate(s, spec, 170, 3, stride=5, seed=2)
    np.testing.assert_array_equal(a.per_horizon_epsilon, b.per_horizon_epsilon)


def test_parameter_search_single_candidate():
    s = synthetic_series(300, seed=0)
    spec = ModelSpec("regression", FeatureSpec(use_day_of_week=True))
    best, scored = parameter_search(s, [spec])
    assert best is spec and len(scored) == 1


def test_parameter_search_prefers_more_centres_when_they_help():
    # a smooth nonlinear function of one lag: 35 centres resolve it, 5 cannot
    rng = np.random.default_rng(0)
    n = 900
    y = np.empty(n)
    y[0] = 0.1
    for t in range(1, n):
        y[t] = 3 * np.sin(3 * y[t - 1]) + 0.05 * rng.normal()
    s = as_series(y)
    grid = expand_grid("rbf", FeatureSpec(lag_count=1), {"K": [5, 35], "alpha": 1,
                                                          "lambda_value": 1.0})
    r2 = [validation_score(s, spec)[0] for spec in grid]
    assert r2[1] > r2[0]
    best, _ = parameter_search(s, grid)
    assert best.hyper["K"] == 35


def test_parameter_search_linear_data_prefers_regression():
    rng = np.random.default_rng(1)
    n = 500
    y = np.empty(n)
    y[0] = 0
    for t in range(1, n):
        y[t] = 0.7 * y[t - 1] + rng.normal()
    s = as_series(y)
    fs = FeatureSpec(lag_count=1)
    reg = ModelSpec("regression", fs)
    rf = ModelSpec("rf", fs, {"a": 10, "c": 20})
    best, _ = parameter_search(s, [rf, reg])
    assert best is reg


def test_parameter_search_tie_prefers_fewer_parameters(monkeypatch):
    import cashflow_savings.evaluation as ev
    s = synthetic_series(300, seed=0)
    grid = expand_grid("rf", FeatureSpec(use_day_of_week=True), {"a": [1, 2, 3]})
    sizes = {1: 9, 2: 4, 3: 4}
    monkeypatch.setattr(ev, "validation_score", lambda series, spec, *a, **k:
                        (0.5, sizes[spec.hyper["a"]]))
    best, _ = parameter_search(s, grid)
    assert best.hyper["a"] == 2


def test_parameter_search_all_fail():
    s = as_series(np.r_[np.zeros(100), np.ones(2)])
    with pytest.raises((DegenerateError, ValidationError)):
        parameter_search(s, [ModelSpec("ar", hyper={"max_p": 1})])

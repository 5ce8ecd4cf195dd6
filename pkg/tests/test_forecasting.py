import numpy as np
import pytest

from pmforecast.aggregation import build_series, collect_occurrences, plan_equisized
from pmforecast.dfg import END, START
from pmforecast.errors import NotConverged, SeriesTooShort, SingularDesign
from pmforecast.forecasting import (
    ForecastSpec,
    difference,
    fit_ar,
    fit_arima,
    fit_garch,
    fit_ses_holt,
    forecast_dfg,
    forecast_series,
    integrate,
    mean_forecast,
    naive_forecast,
    spec_from_label,
    sum_dfgs,
)

from conftest import make_log


# ------------------------------------------------------------- simulators


def simulate_ar1(phi: float, sigma: float, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    y = np.zeros(n)
    for t in range(1, n):
        y[t] = phi * y[t - 1] + rng.normal(0.0, sigma)
    return y


def simulate_arma11(phi: float, theta: float, sigma: float, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    eps = rng.normal(0.0, sigma, n)
    y = np.zeros(n)
    for t in range(1, n):
        y[t] = phi * y[t - 1] + eps[t] + theta * eps[t - 1]
    return y


def simulate_garch11(omega: float, alpha: float, beta: float, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    y = np.zeros(n)
    sig2 = omega / (1.0 - alpha - beta)
    eps2 = sig2
    for t in range(n):
        sig2 = omega + alpha * eps2 + beta * sig2
        y[t] = rng.normal(0.0, np.sqrt(sig2))
        eps2 = y[t] * y[t]
    return y


# ------------------------------------------------------------- naive/mean


def test_naive_basics():
    assert list(naive_forecast([3, 9], 3)) == [9, 9, 9]
    assert list(naive_forecast([0], 2)) == [0, 0]


def test_mean_basics():
    assert list(mean_forecast([1, 1, 1], 2)) == [1, 1]
    assert mean_forecast([0, 1, 0], 1)[0] == pytest.approx(1 / 3)
    assert mean_forecast([2, 4], 1)[0] == 3


def test_forecast_series_constant_naive():
    spec = ForecastSpec(family="naive", horizon=3)
    assert list(forecast_series([1, 1, 1], spec).values) == [1, 1, 1]


def test_forecast_series_mean_table2_row():
    # the (a1,a1) equitemporal series of the running example
    spec = ForecastSpec(family="mean", horizon=1)
    assert forecast_series([0, 1, 0], spec).values[0] == pytest.approx(1 / 3)


# -------------------------------------------------------------- smoothing


def test_ses_alpha_one_is_naive():
    rng = np.random.default_rng(0)
    for _ in range(20):
        y = rng.integers(0, 20, size=12).astype(float)
        spec = ForecastSpec(family="ses", alpha=1.0, horizon=4)
        assert np.allclose(forecast_series(y, spec).values, naive_forecast(y, 4))


def test_ses_alpha_zero_constant_series():
    spec = ForecastSpec(family="ses", alpha=0.0, horizon=2)
    assert list(forecast_series([1.0, 1.0, 1.0], spec).values) == [1.0, 1.0]


def test_holt_exact_line_alpha_beta_one():
    # hand-run recursion with alpha=beta=1 on y_t = 2t: level tracks y,
    # trend stays 2, so the forecast continues the line
    y = np.arange(1, 11, dtype=float) * 2
    spec = ForecastSpec(family="holt", alpha=1.0, beta=1.0, horizon=3)
    model = fit_ses_holt(y, spec)
    assert model.coefficients["trend"] == pytest.approx(2.0)
    assert np.allclose(model.forecast(3), y[-1] + 2 * np.arange(1, 4))


def test_holt_fitted_on_line():
    spec = ForecastSpec(family="holt", horizon=2)
    values = forecast_series(np.array([1.0, 2.0, 3.0, 4.0, 5.0]), spec).values
    assert values == pytest.approx([6.0, 7.0], abs=1e-6)


def test_ses_too_short():
    with pytest.raises(SeriesTooShort):
        fit_ses_holt([1.0], ForecastSpec(family="ses"))
    with pytest.raises(SeriesTooShort):
        fit_ses_holt([1.0, 2.0], ForecastSpec(family="holt"))


def test_holt_damped_trend_flattens():
    y = np.arange(1, 11, dtype=float) * 2
    plain = ForecastSpec(family="holt", alpha=1.0, beta=1.0, horizon=10)
    damped = ForecastSpec(family="holt", alpha=1.0, beta=1.0, damping=0.5, horizon=10)
    linear = forecast_series(y, plain).values
    flat = forecast_series(y, damped).values
    # damped forecast converges to level + trend * phi/(1-phi) instead of growing
    assert flat[-1] < linear[-1]
    assert flat[-1] == pytest.approx(y[-1] + 2 * sum(0.5 ** k for k in range(1, 11)))


# ------------------------------------------------------------ differencing


def test_difference_basics():
    assert list(difference([1, 2, 4], 1)) == [1, 2]
    assert list(difference([1, 2, 4], 2)) == [1]
    with pytest.raises(SeriesTooShort):
        difference([1], 1)


def test_integrate_inverts_difference():
    rng = np.random.default_rng(3)
    y = rng.normal(size=30)
    for d in (1, 2, 3):
        z = difference(y, d)
        tails = [difference(y, i)[d - 1 - i] for i in range(d)]
        rebuilt = integrate(z, tails, d)
        assert np.allclose(rebuilt, y[d:])


# ----------------------------------------------------------------------- AR


def test_ar_constant_series_falls_back_to_mean():
    with pytest.raises(SingularDesign):
        fit_ar([5.0] * 10, 2)
    spec = ForecastSpec(family="ar", p=2, horizon=2)
    result = forecast_series([5.0] * 10, spec)
    assert list(result.values) == [5.0, 5.0]
    assert result.model_used == "mean"
    assert result.fallback


def test_ar0_is_mean():
    y = np.array([2.0, 4.0, 9.0, 1.0])
    assert np.allclose(fit_ar(y, 0).forecast(3), mean_forecast(y, 3))


def test_ar1_recovery_with_normal_equation_oracle():
    y = simulate_ar1(0.6, 0.1, 500, seed=42)
    model = fit_ar(y, 1)
    phi = model.coefficients["phi_1"]
    assert 0.5 <= phi <= 0.7
    # oracle: solve the normal equations directly
    X = np.column_stack([np.ones(len(y) - 1), y[:-1]])
    target = y[1:]
    oracle = np.linalg.solve(X.T @ X, X.T @ target)
    assert phi == pytest.approx(oracle[1], abs=1e-8)
    assert model.coefficients["const"] == pytest.approx(oracle[0], abs=1e-8)


def test_ar1_without_intercept_powers():
    y = simulate_ar1(0.7, 0.2, 60, seed=9) + 1.0
    model = fit_ar(y, 1, include_const=False)
    phi = model.coefficients["phi_1"]
    forecast = model.forecast(5)
    assert np.allclose(forecast, phi ** np.arange(1, 6) * y[-1], atol=1e-10)


def test_ar_too_short():
    with pytest.raises(SeriesTooShort):
        fit_ar([1.0, 2.0], 1)


# -------------------------------------------------------------------- ARIMA


def css_oracle(y: np.ndarray, const: float, phi: float, theta: float) -> float:
    """Independent conditional-sum-of-squares for ARMA(1,1)."""
    eps = np.zeros(len(y))
    total = 0.0
    for t in range(1, len(y)):
        pred = const + phi * y[t - 1] + theta * eps[t - 1]
        eps[t] = y[t] - pred
        total += eps[t] ** 2
    return total


def test_arima_010_is_naive():
    rng = np.random.default_rng(1)
    for _ in range(20):
        y = rng.integers(0, 30, size=15).astype(float)
        spec = ForecastSpec(family="arima", p=0, d=1, q=0, horizon=5)
        assert np.allclose(forecast_series(y, spec).values, naive_forecast(y, 5))


def test_arima_000_is_mean():
    rng = np.random.default_rng(2)
    for _ in range(20):
        y = rng.integers(0, 30, size=15).astype(float)
        spec = ForecastSpec(family="arima", p=0, d=0, q=0, horizon=4)
        assert np.allclose(forecast_series(y, spec).values, mean_forecast(y, 4))


def test_arma11_recovery_with_css_grid_oracle():
    y = simulate_arma11(0.5, 0.3, 0.05, 1000, seed=7)
    model = fit_arima(y, 1, 0, 1)
    assert model.diagnostics.converged
    phi = model.coefficients["phi_1"]
    theta = model.coefficients["theta_1"]
    assert 0.35 <= phi <= 0.65
    assert 0.15 <= theta <= 0.45
    # oracle: the optimizer's CSS must beat a coarse grid over (phi, theta)
    const = model.coefficients["const"]
    fitted_css = css_oracle(y, const, phi, theta)
    grid = np.arange(-0.9, 0.91, 0.05)
    grid_best = min(css_oracle(y, 0.0, p, t) for p in grid for t in grid)
    assert fitted_css <= grid_best + 1e-6


def test_arima_212_runs_on_counts():
    rng = np.random.default_rng(8)
    y = np.cumsum(rng.integers(-2, 4, size=60)).astype(float) + 50
    model = fit_arima(y, 2, 1, 2)
    forecast = model.forecast(5)
    assert forecast.shape == (5,)
    assert np.all(np.isfinite(forecast))


def test_arima_too_short():
    with pytest.raises(SeriesTooShort):
        fit_arima([1.0, 2.0, 3.0], 2, 1, 2)


# -------------------------------------------------------------------- GARCH


def garch_loglik_oracle(y: np.ndarray, mu: float, omega: float, alpha: float, beta: float) -> float:
    """Independent Gaussian log likelihood of a GARCH(1,1)."""
    eps2 = (y - mu) ** 2
    var0 = y.var()
    sig2 = np.empty(len(y))
    sig2[0] = var0
    for t in range(1, len(y)):
        sig2[t] = omega + alpha * eps2[t - 1] + beta * sig2[t - 1]
    return -0.5 * float(np.sum(np.log(2 * np.pi) + np.log(sig2) + eps2 / sig2))


def test_garch_constant_series():
    model = fit_garch([4.0] * 12, 1, 1)
    assert model.coefficients["mu"] == 4.0
    assert list(model.forecast(3)) == [4.0, 4.0, 4.0]


def test_garch11_recovery_with_likelihood_oracle():
    y = simulate_garch11(0.05, 0.1, 0.8, 2000, seed=11)
    model = fit_garch(y, 1, 1)
    assert model.diagnostics.converged
    alpha = model.coefficients["alpha_1"]
    beta = model.coefficients["beta_1"]
    assert 0.02 <= alpha <= 0.25
    assert 0.6 <= beta <= 0.95
    fitted_ll = garch_loglik_oracle(
        y, model.coefficients["mu"], model.coefficients["omega"], alpha, beta
    )
    true_ll = garch_loglik_oracle(y, 0.0, 0.05, 0.1, 0.8)
    assert fitted_ll >= true_ll - 1e-6


def test_garch_long_run_variance_on_iid_noise():
    rng = np.random.default_rng(13)
    y = rng.normal(0.0, 1.0, 2000)
    model = fit_garch(y, 1, 1)
    lrv = model.coefficients["long_run_variance"]
    assert abs(lrv - y.var()) / y.var() < 0.2


def test_garch_too_short():
    with pytest.raises(SeriesTooShort):
        fit_garch([1.0] * 9, 1, 1)


# ------------------------------------------------------------- dispatching


def test_clip_negative_default():
    y = np.array([10.0, 8.0, 6.0, 4.0, 2.0])
    spec = ForecastSpec(family="holt", alpha=1.0, beta=1.0, horizon=4)
    values = forecast_series(y, spec).values
    assert np.all(values >= 0)
    assert values[-1] == 0.0


def test_explosion_falls_back_to_naive():
    # an AR fit on an explosive series produces huge recursive forecasts
    y = np.array([1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0])
    spec = ForecastSpec(family="ar", p=1, horizon=80, clip_negative=False)
    result = forecast_series(y, spec)
    assert result.fallback
    assert result.model_used == "naive"
    assert np.all(result.values == y[-1])


def test_strict_mode_raises_on_explosion():
    y = np.array([1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0])
    spec = ForecastSpec(family="ar", p=1, horizon=80, clip_negative=False)
    with pytest.raises(NotConverged):
        forecast_series(y, spec, allow_fallback=False)


def test_short_series_falls_back():
    spec = ForecastSpec(family="arima", p=2, d=1, q=2, horizon=2)
    result = forecast_series([3.0, 4.0], spec)
    assert result.model_used == "naive"
    with pytest.raises(SeriesTooShort):
        forecast_series([3.0, 4.0], spec, allow_fallback=False)


def test_scale_equivariance():
    rng = np.random.default_rng(21)
    y = rng.integers(1, 40, size=24).astype(float)
    for family in ("naive", "mean", "ses", "holt"):
        spec = ForecastSpec(family=family, horizon=3)
        base = forecast_series(y, spec).values
        scaled = forecast_series(7.0 * y, spec).values
        assert np.allclose(scaled, 7.0 * base, rtol=1e-8), family


def test_forecast_determinism():
    y = simulate_arma11(0.4, 0.2, 1.0, 80, seed=5) + 10
    spec = ForecastSpec(family="arima", p=1, d=0, q=1, horizon=6)
    a = forecast_series(y, spec).values
    b = forecast_series(y.copy(), spec).values
    assert a.tobytes() == b.tobytes()


def test_spec_from_label():
    assert spec_from_label("nav", 5).family == "naive"
    s = spec_from_label("arima212", 5)
    assert (s.family, s.p, s.d, s.q) == ("arima", 2, 1, 2)
    s = spec_from_label("ar2", 5)
    assert (s.family, s.p) == ("ar", 2)
    assert spec_from_label("hw", 5).family == "holt"
    s = spec_from_label("garch", 5)
    assert (s.family, s.p, s.q) == ("garch", 1, 1)
    s = spec_from_label("garch21", 5)
    assert (s.p, s.q) == (2, 1)
    with pytest.raises(ValueError):
        spec_from_label("prophet", 5)


# ----------------------------------------------------------- whole-DFG runs


def test_forecast_dfg_constant_series_naive():
    log = make_log([["a", "b"]] * 6)
    series = build_series(collect_occurrences(log), plan_equisized(log, 6))
    spec = ForecastSpec(family="naive", horizon=2)
    out = forecast_dfg(series, 6, spec, h=2)
    from pmforecast.aggregation import window_dfg

    last_train = window_dfg(series, 6, 6)
    for g in out.dfgs:
        assert g.edges == last_train.edges


def test_forecast_dfg_table2_equisized_naive(table1_log):
    series = build_series(collect_occurrences(table1_log), plan_equisized(table1_log, 3))
    spec = ForecastSpec(family="naive", horizon=1)
    out = forecast_dfg(series, 3, spec, h=1)
    g = out.dfgs[0]
    assert g.weight("a1", "a1") == 0
    assert g.weight("a1", "a2") == 1
    assert g.weight("a2", "a1") == 0
    assert g.weight("a2", "a2") == 1


def test_forecast_dfg_drops_negative_edges():
    log = make_log([["a", "b"]] * 8)
    series = build_series(collect_occurrences(log), plan_equisized(log, 8))
    # force a declining trend so holt forecasts below zero
    series.series[("a", "b")] = np.array([8, 7, 6, 5, 4, 3, 2, 1])
    spec = ForecastSpec(family="holt", alpha=1.0, beta=1.0, horizon=4)
    out = forecast_dfg(series, 8, spec, h=4)
    assert ("a", "b") not in out.dfgs[-1].edges


def test_forecast_dfg_exclude_endpoints(table1_log):
    series = build_series(collect_occurrences(table1_log), plan_equisized(table1_log, 3))
    spec = ForecastSpec(family="naive", horizon=1)
    out = forecast_dfg(series, 3, spec, h=1, exclude_endpoints=True)
    assert all(a != START and b != END for a, b in out.results)


def test_sum_dfgs(table1_log):
    series = build_series(collect_occurrences(table1_log), plan_equisized(table1_log, 3))
    from pmforecast.aggregation import window_dfg

    parts = [window_dfg(series, i, i) for i in (1, 2, 3)]
    total = sum_dfgs(parts)
    assert total.edges == window_dfg(series, 1, 3).edges

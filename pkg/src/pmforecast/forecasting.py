"""Univariate forecasting of DF series and assembly of forecasted DFGs.

One model is fitted per DF pair; multi-step forecasts always use the
recursive strategy (each step's forecast feeds back as an input for the
next).  Supported families: naive, mean, simple exponential smoothing,
Holt's linear trend, AR(p) by least squares, ARIMA(p,d,q) by
conditional sum of squares, and GARCH(p,q) by Gaussian quasi maximum
likelihood with a constant mean equation.

All fitters are deterministic: fixed start points, fixed grid orders,
and a bounded simplex optimizer (at most 500 iterations, parameter
tolerance 1e-6).
"""

from __future__ import annotations

import dataclasses
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .aggregation import DfSeriesSet
from .dfg import DFG, END, START, Pair, make_dfg
from .errors import NotConverged, SeriesTooShort, SingularDesign

FAMILIES = ("naive", "mean", "ses", "holt", "ar", "arima", "garch")

MAX_ITER = 500
PARAM_TOL = 1e-6
SMOOTHING_GRID_STEP = 0.05
SMOOTHING_REFINE_TOL = 1e-4
#: forecasts larger than this multiple of the series maximum trigger fallback
EXPLOSION_FACTOR = 1e6


@dataclass(frozen=True)
class ForecastSpec:
    family: str
    p: int = 0
    d: int = 0
    q: int = 0
    alpha: Optional[float] = None
    beta: Optional[float] = None
    #: trend damping factor in (0, 1]; None or 1.0 keeps the plain linear trend
    damping: Optional[float] = None
    horizon: int = 1
    clip_negative: bool = True

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if min(self.p, self.d, self.q) < 0:
            raise ValueError("model orders must be non-negative")
        if self.family == "garch" and (self.p < 1 or self.q < 1):
            raise ValueError("garch requires p >= 1 and q >= 1")
        if self.damping is not None and not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must be in (0, 1]")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


@dataclass(frozen=True)
class FitDiagnostics:
    converged: bool
    sse: float
    iterations: int


@dataclass
class FittedModel:
    family: str
    coefficients: dict[str, float]
    diagnostics: FitDiagnostics
    _state: dict = field(default_factory=dict, repr=False)

    def forecast(self, h: int) -> np.ndarray:
        """Recursive h-step forecast; refuses to extrapolate a failed fit."""
        if not self.diagnostics.converged:
            raise NotConverged(f"{self.family} fit did not converge")
        if h < 1:
            raise ValueError("h must be >= 1")
        return _FORECASTERS[self.family](self, h)


@dataclass(frozen=True)
class ForecastResult:
    values: np.ndarray
    model_used: str
    fallback: bool = False


def _as_series(y: Sequence[float] | np.ndarray) -> np.ndarray:
    arr = np.asarray(y, dtype=float)
    if arr.ndim != 1:
        raise ValueError("series must be one-dimensional")
    return arr


def min_series_length(spec: ForecastSpec) -> int:
    if spec.family in ("naive", "mean"):
        return 1
    if spec.family == "ses":
        return 2
    if spec.family == "holt":
        return 3
    if spec.family in ("ar", "arima"):
        p = spec.p
        d = spec.d if spec.family == "arima" else 0
        q = spec.q if spec.family == "arima" else 0
        return p + d + q + 2
    if spec.family == "garch":
        return 10
    raise ValueError(spec.family)


# ---------------------------------------------------------------- naive/mean


def naive_forecast(y: Sequence[float], h: int) -> np.ndarray:
    """Repeat the last observed value."""
    arr = _as_series(y)
    if len(arr) < 1:
        raise SeriesTooShort("naive forecast needs at least one observation")
    return np.full(h, arr[-1])


def mean_forecast(y: Sequence[float], h: int) -> np.ndarray:
    """Repeat the arithmetic mean of the series."""
    arr = _as_series(y)
    if len(arr) < 1:
        raise SeriesTooShort("mean forecast needs at least one observation")
    return np.full(h, float(arr.mean()))


# ------------------------------------------------------- exponential smoothing


def _smoothing_pass(
    y: np.ndarray, alpha: float, beta: float, trended: bool, damping: float = 1.0
) -> tuple[float, float, float]:
    """Run the level/trend recursion; returns (level, trend, one-step SSE)."""
    level = float(y[0])
    trend = float(y[1] - y[0]) if trended else 0.0
    sse = 0.0
    for t in range(1, len(y)):
        prev_level = level
        err = y[t] - (level + damping * trend)
        sse += err * err
        level = alpha * y[t] + (1.0 - alpha) * (prev_level + damping * trend)
        if trended:
            trend = beta * (level - prev_level) + (1.0 - beta) * damping * trend
    return level, trend, sse


def fit_ses_holt(y: Sequence[float], spec: ForecastSpec) -> FittedModel:
    """Fit simple or trend-corrected exponential smoothing.

    Smoothing weights come from the spec when fixed there; otherwise a
    0.05-step grid search on one-step-ahead SSE is refined by a local
    search to 1e-4.  Level starts at the first value, trend (when used)
    at the first difference.
    """
    arr = _as_series(y)
    trended = spec.family == "holt"
    min_len = 3 if trended else 2
    if len(arr) < min_len:
        raise SeriesTooShort(f"{spec.family} needs at least {min_len} observations")
    damping = spec.damping if (trended and spec.damping is not None) else 1.0

    if spec.alpha is not None and (not trended or spec.beta is not None):
        alpha, beta = spec.alpha, spec.beta if trended else 0.0
    else:
        grid = np.arange(0.0, 1.0 + 1e-9, SMOOTHING_GRID_STEP)
        if trended:
            best = (math.inf, 0.0, 0.0)
            for a in grid:
                for b in grid:
                    sse = _smoothing_pass(arr, a, b, True, damping)[2]
                    if sse < best[0]:
                        best = (sse, a, b)
            _, a0, b0 = best

            def objective(x: np.ndarray) -> float:
                a = min(max(x[0], 0.0), 1.0)
                b = min(max(x[1], 0.0), 1.0)
                return _smoothing_pass(arr, a, b, True, damping)[2]

            res = minimize(
                objective,
                np.array([a0, b0]),
                method="Nelder-Mead",
                options={"xatol": SMOOTHING_REFINE_TOL, "fatol": 1e-12, "maxiter": MAX_ITER},
            )
            alpha = min(max(res.x[0], 0.0), 1.0)
            beta = min(max(res.x[1], 0.0), 1.0)
        else:
            sses = [_smoothing_pass(arr, a, 0.0, False)[2] for a in grid]
            a0 = grid[int(np.argmin(sses))]
            res = minimize_scalar(
                lambda a: _smoothing_pass(arr, min(max(a, 0.0), 1.0), 0.0, False)[2],
                bounds=(max(0.0, a0 - SMOOTHING_GRID_STEP), min(1.0, a0 + SMOOTHING_GRID_STEP)),
                method="bounded",
                options={"xatol": SMOOTHING_REFINE_TOL},
            )
            alpha, beta = min(max(res.x, 0.0), 1.0), 0.0

    level, trend, sse = _smoothing_pass(arr, alpha, beta, trended, damping)
    coeffs = {"alpha": alpha, "level": level}
    if trended:
        coeffs["beta"] = beta
        coeffs["trend"] = trend
    return FittedModel(
        family=spec.family,
        coefficients=coeffs,
        diagnostics=FitDiagnostics(converged=True, sse=float(sse), iterations=0),
        _state={"level": level, "trend": trend, "damping": damping},
    )


def _forecast_smoothing(model: FittedModel, h: int) -> np.ndarray:
    level = model._state["level"]
    trend = model._state["trend"]
    damping = model._state.get("damping", 1.0)
    if damping == 1.0:
        return level + trend * np.arange(1, h + 1)
    # damped Holt: the trend contribution is the partial geometric sum
    steps = np.cumsum(damping ** np.arange(1, h + 1))
    return level + trend * steps


# ------------------------------------------------------------- differencing


def difference(y: Sequence[float], d: int) -> np.ndarray:
    """d-fold first differences."""
    arr = _as_series(y)
    if d < 0:
        raise ValueError("d must be non-negative")
    if len(arr) <= d:
        raise SeriesTooShort(f"cannot difference {len(arr)} points {d} times")
    return np.diff(arr, n=d) if d else arr.copy()


def integrate(forecast_deltas: Sequence[float], tails: Sequence[float], d: int) -> np.ndarray:
    """Exact inverse of ``difference`` for forecasts.

    ``tails[i]`` is the last value of the i-times differenced series,
    for i in 0..d-1.
    """
    if d == 0:
        return _as_series(forecast_deltas)
    if len(tails) != d:
        raise ValueError(f"need {d} tail values, got {len(tails)}")
    out = _as_series(forecast_deltas)
    for i in range(d - 1, -1, -1):
        out = tails[i] + np.cumsum(out)
    return out


# ----------------------------------------------------------------------- AR


def fit_ar(y: Sequence[float], p: int, include_const: bool = True) -> FittedModel:
    """Least-squares autoregression of order p.

    p=0 reduces to an intercept-only regression, i.e. the mean forecast.
    Raises SingularDesign when the lagged design matrix is rank
    deficient (e.g. a constant series with p >= 1).
    """
    arr = _as_series(y)
    if len(arr) < p + 2:
        raise SeriesTooShort(f"ar({p}) needs at least {p + 2} observations")
    n_rows = len(arr) - p
    cols = []
    if include_const:
        cols.append(np.ones(n_rows))
    for i in range(1, p + 1):
        cols.append(arr[p - i : len(arr) - i])
    design = np.column_stack(cols) if cols else np.empty((n_rows, 0))
    target = arr[p:]
    if design.shape[1] == 0:
        raise ValueError("ar(0) without constant has no parameters")
    coef, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < design.shape[1]:
        raise SingularDesign(f"ar({p}) design matrix is rank deficient")
    resid = target - design @ coef
    sse = float(resid @ resid)
    offset = 1 if include_const else 0
    const = float(coef[0]) if include_const else 0.0
    phi = [float(c) for c in coef[offset:]]
    coeffs = {"const": const}
    coeffs.update({f"phi_{i + 1}": v for i, v in enumerate(phi)})
    nobs = max(n_rows, 1)
    coeffs["sigma2"] = sse / nobs
    return FittedModel(
        family="ar",
        coefficients=coeffs,
        diagnostics=FitDiagnostics(converged=True, sse=sse, iterations=0),
        _state={"tail": arr[len(arr) - p :] if p else np.empty(0), "phi": np.array(phi), "const": const},
    )


def _forecast_ar(model: FittedModel, h: int) -> np.ndarray:
    phi = model._state["phi"]
    const = model._state["const"]
    history = list(model._state["tail"])
    out = np.empty(h)
    for k in range(h):
        value = const
        for i, coef in enumerate(phi, start=1):
            value += coef * history[-i]
        out[k] = value
        history.append(value)
    return out


# -------------------------------------------------------------------- ARIMA


def _css_residuals(z: np.ndarray, const: float, phi: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Conditional-sum-of-squares residuals; the first p are fixed at 0."""
    n = len(z)
    p, q = len(phi), len(theta)
    eps = np.zeros(n)
    for t in range(p, n):
        pred = const
        for i in range(p):
            pred += phi[i] * z[t - 1 - i]
        for j in range(q):
            k = t - 1 - j
            if k >= 0:
                pred += theta[j] * eps[k]
        eps[t] = z[t] - pred
    return eps


def fit_arima(y: Sequence[float], p: int, d: int, q: int) -> FittedModel:
    """ARIMA(p,d,q) by conditional sum of squares.

    The series is differenced d times, (const, phi, theta) minimize the
    CSS with pre-sample errors fixed at zero, and forecasts are produced
    recursively on the differenced scale before integrating back.  A
    constant is included only for d=0, so ARIMA(0,1,0) is the pure
    random walk.
    """
    arr = _as_series(y)
    if len(arr) < p + d + q + 2:
        raise SeriesTooShort(f"arima({p},{d},{q}) needs at least {p + d + q + 2} observations")
    z = difference(arr, d)
    use_const = d == 0
    tails = [float(difference(arr, i)[-1]) for i in range(d)]

    if p == 0 and q == 0:
        const = float(z.mean()) if use_const else 0.0
        eps = z - const
        sse = float(eps @ eps)
        converged, iterations = True, 0
        phi = np.empty(0)
        theta = np.empty(0)
    else:
        n_params = (1 if use_const else 0) + p + q

        def unpack(x: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
            offset = 1 if use_const else 0
            c = float(x[0]) if use_const else 0.0
            return c, x[offset : offset + p], x[offset + p :]

        def objective(x: np.ndarray) -> float:
            c, ph, th = unpack(x)
            eps = _css_residuals(z, c, ph, th)
            sse = float(eps[p:] @ eps[p:])
            return sse if math.isfinite(sse) else 1e300

        x0 = np.zeros(n_params)
        if use_const:
            x0[0] = float(z.mean())
        f0 = objective(x0)
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={
                "maxiter": MAX_ITER,
                "maxfev": 10 * MAX_ITER,
                "xatol": PARAM_TOL,
                "fatol": 1e-8 * (1.0 + abs(f0)),
            },
        )
        const, phi, theta = unpack(res.x)
        phi, theta = np.array(phi, dtype=float), np.array(theta, dtype=float)
        eps = _css_residuals(z, const, phi, theta)
        sse = float(eps[p:] @ eps[p:])
        converged = bool(res.success) and math.isfinite(sse)
        iterations = int(res.nit)

    coeffs = {"const": const}
    coeffs.update({f"phi_{i + 1}": float(v) for i, v in enumerate(phi)})
    coeffs.update({f"theta_{j + 1}": float(v) for j, v in enumerate(theta)})
    nobs = max(len(z) - p, 1)
    coeffs["sigma2"] = sse / nobs
    return FittedModel(
        family="arima",
        coefficients=coeffs,
        diagnostics=FitDiagnostics(converged=converged, sse=sse, iterations=iterations),
        _state={
            "z": z,
            "eps": eps,
            "const": const,
            "phi": phi,
            "theta": theta,
            "tails": tails,
            "d": d,
        },
    )


def _forecast_arima(model: FittedModel, h: int) -> np.ndarray:
    st = model._state
    z, eps = list(st["z"]), st["eps"]
    const, phi, theta, d = st["const"], st["phi"], st["theta"], st["d"]
    n = len(eps)
    deltas = np.empty(h)
    for k in range(h):
        t = n + k
        pred = const
        for i in range(len(phi)):
            pred += phi[i] * z[t - 1 - i]
        for j in range(len(theta)):
            idx = t - 1 - j
            if 0 <= idx < n:
                pred += theta[j] * eps[idx]
        deltas[k] = pred
        z.append(pred)
    return integrate(deltas, st["tails"], d)


# -------------------------------------------------------------------- GARCH


def _garch_filter(
    y: np.ndarray, mu: float, omega: float, alpha: np.ndarray, beta: np.ndarray, var0: float
) -> tuple[np.ndarray, np.ndarray]:
    """Conditional variance recursion; pre-sample terms use the sample variance."""
    n = len(y)
    eps2 = (y - mu) ** 2
    sig2 = np.empty(n)
    sig2[0] = var0
    for t in range(1, n):
        v = omega
        for i in range(len(alpha)):
            k = t - 1 - i
            v += alpha[i] * (eps2[k] if k >= 0 else var0)
        for j in range(len(beta)):
            k = t - 1 - j
            v += beta[j] * (sig2[k] if k >= 0 else var0)
        sig2[t] = v
    return eps2, sig2


def fit_garch(y: Sequence[float], p: int, q: int) -> FittedModel:
    """GARCH(p,q) with constant mean, by Gaussian quasi maximum likelihood.

    p counts variance lags, q squared-error lags.  The point forecast of
    the series is the constant mean; variance forecasts are kept for
    diagnostics.  Parameters respect omega > 0, alpha_i, beta_j >= 0 and
    sum(alpha) + sum(beta) < 1.
    """
    if p < 1 or q < 1:
        raise ValueError("garch requires p >= 1 and q >= 1")
    arr = _as_series(y)
    n = len(arr)
    if n < 10:
        raise SeriesTooShort("garch needs at least 10 observations")
    var0 = float(arr.var())
    if var0 == 0.0:
        # constant series: mean equation is exact, no variance to model
        mu = float(arr[0])
        return FittedModel(
            family="garch",
            coefficients={"mu": mu, "omega": 0.0, "long_run_variance": 0.0},
            diagnostics=FitDiagnostics(converged=True, sse=0.0, iterations=0),
            _state={
                "mu": mu,
                "omega": 0.0,
                "alpha": np.empty(0),
                "beta": np.empty(0),
                "eps2": np.zeros(n),
                "sig2": np.zeros(n),
            },
        )

    def unpack(x: np.ndarray) -> tuple[float, float, np.ndarray, np.ndarray]:
        return float(x[0]), float(x[1]), x[2 : 2 + q], x[2 + q :]

    def neg_loglik(x: np.ndarray) -> float:
        mu, omega, alpha, beta = unpack(x)
        if omega <= 0 or np.any(alpha < 0) or np.any(beta < 0):
            return 1e12
        if alpha.sum() + beta.sum() >= 1.0 - 1e-9:
            return 1e12
        eps2, sig2 = _garch_filter(arr, mu, omega, alpha, beta, var0)
        if np.any(sig2 <= 0):
            return 1e12
        nll = 0.5 * float(np.sum(np.log(2 * np.pi) + np.log(sig2) + eps2 / sig2))
        return nll if math.isfinite(nll) else 1e12

    x0 = np.concatenate(
        [[float(arr.mean()), 0.1 * var0], np.full(q, 0.1 / q), np.full(p, 0.8 / p)]
    )
    f0 = neg_loglik(x0)
    res = minimize(
        neg_loglik,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": MAX_ITER,
            "maxfev": 10 * MAX_ITER,
            "xatol": PARAM_TOL,
            "fatol": 1e-8 * (1.0 + abs(f0)),
        },
    )
    mu, omega, alpha, beta = unpack(res.x)
    alpha, beta = np.array(alpha, dtype=float), np.array(beta, dtype=float)
    eps2, sig2 = _garch_filter(arr, mu, omega, alpha, beta, var0)
    nll = neg_loglik(res.x)
    converged = bool(res.success) and nll < 1e12
    persistence = float(alpha.sum() + beta.sum())
    coeffs = {"mu": mu, "omega": omega}
    coeffs.update({f"alpha_{i + 1}": float(v) for i, v in enumerate(alpha)})
    coeffs.update({f"beta_{j + 1}": float(v) for j, v in enumerate(beta)})
    if persistence < 1:
        coeffs["long_run_variance"] = omega / (1.0 - persistence)
    return FittedModel(
        family="garch",
        coefficients=coeffs,
        diagnostics=FitDiagnostics(converged=converged, sse=float(nll), iterations=int(res.nit)),
        _state={
            "mu": mu,
            "omega": omega,
            "alpha": alpha,
            "beta": beta,
            "eps2": eps2,
            "sig2": sig2,
        },
    )


def _forecast_garch(model: FittedModel, h: int) -> np.ndarray:
    return np.full(h, model._state["mu"])


def garch_variance_forecast(model: FittedModel, h: int) -> np.ndarray:
    """h-step conditional variance path.

    Future squared errors are replaced by their expectation, i.e. the
    variance forecast at that step.
    """
    st = model._state
    omega, alpha, beta = st["omega"], st["alpha"], st["beta"]
    if len(alpha) == 0 and len(beta) == 0:
        return np.zeros(h)
    n = len(st["sig2"])
    eps2 = list(st["eps2"])
    sig2 = list(st["sig2"])
    out = np.empty(h)
    for k in range(h):
        t = n + k
        v = omega
        for i in range(len(alpha)):
            idx = t - 1 - i
            v += alpha[i] * (eps2[idx] if idx < n else sig2[idx])
        for j in range(len(beta)):
            v += beta[j] * sig2[t - 1 - j]
        out[k] = v
        sig2.append(v)
        eps2.append(v)
    return out


_FORECASTERS = {
    "ses": _forecast_smoothing,
    "holt": _forecast_smoothing,
    "ar": _forecast_ar,
    "arima": _forecast_arima,
    "garch": _forecast_garch,
}


# ---------------------------------------------------------------- dispatch


def _fit_and_forecast(y: np.ndarray, spec: ForecastSpec, h: int) -> np.ndarray:
    if spec.family == "naive":
        return naive_forecast(y, h)
    if spec.family == "mean":
        return mean_forecast(y, h)
    if spec.family in ("ses", "holt"):
        return fit_ses_holt(y, spec).forecast(h)
    if spec.family == "ar":
        return fit_ar(y, spec.p).forecast(h)
    if spec.family == "arima":
        return fit_arima(y, spec.p, spec.d, spec.q).forecast(h)
    if spec.family == "garch":
        return fit_garch(y, spec.p, spec.q).forecast(h)
    raise ValueError(spec.family)


def forecast_series(
    y: Sequence[float], spec: ForecastSpec, *, allow_fallback: bool = True
) -> ForecastResult:
    """Forecast one series for spec.horizon steps.

    Fallback policy: a fit that does not converge, a series too short
    for the family, or exploding forecast values substitute the naive
    forecast and flag the result.  With ``allow_fallback=False`` those
    conditions raise instead (a rank-deficient AR design still falls
    back to the mean forecast; that substitution is part of the AR
    contract, not a failure).
    """
    arr = _as_series(y)
    if len(arr) < 1:
        raise SeriesTooShort("cannot forecast an empty series")
    h = spec.horizon
    model_used, fallback = spec.family, False
    try:
        values = _fit_and_forecast(arr, spec, h)
    except SingularDesign:
        values = mean_forecast(arr, h)
        model_used, fallback = "mean", True
    except (SeriesTooShort, NotConverged):
        if not allow_fallback:
            raise
        values = naive_forecast(arr, h)
        model_used, fallback = "naive", True
    if model_used == spec.family and np.any(np.abs(values) > EXPLOSION_FACTOR * arr.max()):
        if not allow_fallback:
            raise NotConverged("forecast values exploded beyond the plausible range")
        values = naive_forecast(arr, h)
        model_used, fallback = "naive", True
    if spec.clip_negative:
        values = np.maximum(values, 0.0)
    return ForecastResult(values=values, model_used=model_used, fallback=fallback)


# ------------------------------------------------------------ family labels


_LABELS = {
    "naive": ("naive", 0, 0, 0),
    "nav": ("naive", 0, 0, 0),
    "mean": ("mean", 0, 0, 0),
    "ses": ("ses", 0, 0, 0),
    "holt": ("holt", 0, 0, 0),
    "hw": ("holt", 0, 0, 0),
    "ar": ("ar", 2, 0, 0),
    "arima": ("arima", 2, 1, 2),
    "garch": ("garch", 1, 0, 1),
}


def spec_from_label(
    label: str,
    horizon: int,
    order: Optional[tuple[int, int, int]] = None,
    clip_negative: bool = True,
) -> ForecastSpec:
    """Resolve a family label like "nav", "arima212", "ar2" or "garch" to a spec.

    Explicit ``order`` (p, d, q) wins over digits embedded in the label.
    """
    name = label.strip().lower()
    m = re.fullmatch(r"(ar|arima|garch)(\d+)", name)
    if name in _LABELS:
        family, p, d, q = _LABELS[name]
    elif m:
        family = m.group(1)
        digits = m.group(2)
        if family == "ar":
            p, d, q = int(digits), 0, 0
        elif family == "arima" and len(digits) == 3:
            p, d, q = int(digits[0]), int(digits[1]), int(digits[2])
        elif family == "garch" and len(digits) == 2:
            p, d, q = int(digits[0]), 0, int(digits[1])
        else:
            raise ValueError(f"cannot parse model order from label {label!r}")
    else:
        raise ValueError(f"unknown forecasting family {label!r}")
    if order is not None:
        p, d, q = order
    if family == "garch" and q == 0:
        q = 1
    return ForecastSpec(family=family, p=p, d=d, q=q, horizon=horizon, clip_negative=clip_negative)


# --------------------------------------------------------------- whole DFGs


@dataclass
class DfgForecast:
    """Per-step forecasted DFGs plus the per-pair forecast bookkeeping."""

    dfgs: list[DFG]
    results: dict[Pair, ForecastResult]

    @property
    def fallback_pairs(self) -> list[Pair]:
        return sorted(p for p, r in self.results.items() if r.fallback)

    def window_dfg(self) -> DFG:
        """Edge-wise sum of all step DFGs (the forecasted test-window DFG)."""
        return sum_dfgs(self.dfgs)


def sum_dfgs(dfgs: Sequence[DFG]) -> DFG:
    edges: dict[Pair, float] = {}
    activities: set[str] = set()
    for g in dfgs:
        activities |= g.activities
        for pair, w in g.edges.items():
            edges[pair] = edges.get(pair, 0.0) + w
    return make_dfg(edges, activities)


def _max_workers() -> int:
    raw = os.environ.get("PMF_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def forecast_dfg(
    series_set: DfSeriesSet,
    ts: int,
    spec: ForecastSpec,
    h: Optional[int] = None,
    *,
    strict: bool = False,
    exclude_endpoints: bool = False,
) -> DfgForecast:
    """Forecast every DF series and assemble one DFG per horizon step.

    Trains on the first ``ts`` intervals; the k-th output DFG carries
    each pair's step-k forecast as its edge weight (negatives clipped).
    In strict mode per-pair failures propagate instead of falling back.
    """
    horizon = h if h is not None else spec.horizon
    if not 1 <= ts <= series_set.s:
        raise ValueError(f"train length {ts} outside 1..{series_set.s}")
    run_spec = spec if spec.horizon == horizon else dataclasses.replace(spec, horizon=horizon)
    pairs = series_set.pairs()
    if exclude_endpoints:
        pairs = [p for p in pairs if p[0] != START and p[1] != END]

    def run(pair: Pair) -> ForecastResult:
        y = series_set.series[pair][:ts].astype(float)
        return forecast_series(y, run_spec, allow_fallback=not strict)

    workers = _max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(run, pairs))
    else:
        outputs = [run(p) for p in pairs]
    results = dict(zip(pairs, outputs))
    alphabet = series_set.alphabet()
    dfgs = []
    for k in range(horizon):
        edges = {pair: max(0.0, float(results[pair].values[k])) for pair in pairs}
        dfgs.append(make_dfg(edges, alphabet))
    return DfgForecast(dfgs=dfgs, results=results)

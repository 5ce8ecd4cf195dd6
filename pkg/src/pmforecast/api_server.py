"""HTTP JSON facade for the process-change exploration UI.

One event log is loaded per process.  The server exposes the interval
timeline, range-scoped DFGs, annotated union graphs of two ranges, and
on-demand forecasts whose steps extend the timeline past the observed
intervals.  All responses are pure functions of (log, params); forecast
results are cached and computed at most once per parameter key.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Optional

from fastapi import Body, FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware

from .aggregation import (
    DfSeriesSet,
    build_series,
    collect_occurrences,
    interval_totals,
    plan_equisized,
    plan_equitemporal,
    window_dfg,
    window_sublog,
)
from .dfg import END, START, adfg, apply_sliders, filter_adfg, make_dfg, to_dict
from .errors import EmptyLog, InputError, ModelError, SeriesTooShort
from .event_log import EventLog
from .forecasting import (
    FAMILIES,
    DfgForecast,
    forecast_dfg,
    spec_from_label,
    sum_dfgs,
)
from .relevance import entropic_relevance

AGGREGATIONS = ("equitemporal", "equisized")

SeriesKey = tuple[str, int]
ForecastKey = tuple[str, int, str, int, int, int, int, int]


@dataclass
class ForecastBundle:
    key: ForecastKey
    ts: int
    h: int
    forecast: DfgForecast
    summary: dict


@dataclass
class SessionState:
    log: EventLog
    s: int
    default_agg: str
    strict: bool
    series_cache: dict[SeriesKey, DfSeriesSet] = field(default_factory=dict)
    forecast_cache: dict[ForecastKey, ForecastBundle] = field(default_factory=dict)
    active_forecast: dict[SeriesKey, ForecastKey] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)
    _key_locks: dict = field(default_factory=dict)

    def series(self, agg: str, intervals: int) -> DfSeriesSet:
        key = (agg, intervals)
        with self._lock:
            cached = self.series_cache.get(key)
        if cached is not None:
            return cached
        if agg == "equitemporal":
            plan = plan_equitemporal(self.log, intervals)
        else:
            plan = plan_equisized(self.log, intervals)
        built = build_series(collect_occurrences(self.log), plan)
        with self._lock:
            return self.series_cache.setdefault(key, built)

    def key_lock(self, key: ForecastKey) -> threading.Lock:
        with self._lock:
            return self._key_locks.setdefault(key, threading.Lock())


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise HTTPException(status_code=400, detail=message)


def create_app(
    log: EventLog,
    *,
    s: int = 100,
    default_agg: str = "equisized",
    strict: bool = False,
    static_dir: Optional[str] = None,
) -> FastAPI:
    state = SessionState(log=log, s=s, default_agg=default_agg, strict=strict)
    app = FastAPI(title="pmforecast")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.session = state

    def resolve(agg: Optional[str], intervals: Optional[int]) -> tuple[str, int, DfSeriesSet]:
        agg = agg or state.default_agg
        _check(agg in AGGREGATIONS, f"agg must be one of {AGGREGATIONS}")
        n = intervals if intervals is not None else state.s
        _check(n >= 1, "intervals must be >= 1")
        try:
            return agg, n, state.series(agg, n)
        except InputError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    def active_bundle(agg: str, intervals: int) -> Optional[ForecastBundle]:
        key = state.active_forecast.get((agg, intervals))
        return state.forecast_cache.get(key) if key else None

    def range_dfg(sset: DfSeriesSet, bundle: Optional[ForecastBundle], lo: int, hi: int):
        """Edge sums over [lo, hi]; indices past s address forecast steps."""
        horizon = bundle.h if bundle else 0
        _check(1 <= lo <= hi, "need 1 <= from <= to")
        _check(
            hi <= sset.s + horizon,
            f"interval {hi} beyond available range 1..{sset.s + horizon}",
        )
        parts = []
        if lo <= sset.s:
            parts.append(window_dfg(sset, lo, min(hi, sset.s)))
        if hi > sset.s and bundle is not None:
            steps = bundle.forecast.dfgs[max(lo, sset.s + 1) - sset.s - 1 : hi - sset.s]
            parts.extend(steps)
        if not parts:
            return make_dfg({}, sset.alphabet())
        return sum_dfgs(parts)

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/api/timeline")
    def timeline(
        agg: Optional[str] = Query(default=None),
        intervals: Optional[int] = Query(default=None),
    ) -> dict:
        agg_kind, n, sset = resolve(agg, intervals)
        totals = interval_totals(sset)
        items = []
        for i in range(n):
            entry = {
                "index": i + 1,
                "kind": "actual",
                "total": float(totals[i]),
                "start": None,
                "end": None,
            }
            if sset.plan.kind == "equitemporal":
                entry["start"] = sset.plan.boundaries[i].isoformat()
                entry["end"] = sset.plan.boundaries[i + 1].isoformat()
            else:
                first, last = sset.plan.time_ranges[i]
                entry["start"] = first.isoformat()
                entry["end"] = last.isoformat()
            items.append(entry)
        bundle = active_bundle(agg_kind, n)
        if bundle is not None:
            for k, step in enumerate(bundle.forecast.dfgs):
                total = sum(
                    w for (a, b), w in step.edges.items()
                    if a != START and b != END
                )
                items.append(
                    {
                        "index": n + k + 1,
                        "kind": "forecast",
                        "total": total,
                        "start": None,
                        "end": None,
                    }
                )
        return {"aggregation": agg_kind, "s": n, "horizon": bundle.h if bundle else 0, "intervals": items}

    @app.get("/api/dfg")
    def get_dfg(
        from_: int = Query(alias="from"),
        to: int = Query(),
        activity_pct: float = Query(default=1.0),
        path_pct: float = Query(default=1.0),
        agg: Optional[str] = Query(default=None),
        intervals: Optional[int] = Query(default=None),
    ) -> dict:
        agg_kind, n, sset = resolve(agg, intervals)
        _check(0.0 < activity_pct <= 1.0 and 0.0 < path_pct <= 1.0, "slider fractions must be in (0, 1]")
        bundle = active_bundle(agg_kind, n)
        g = range_dfg(sset, bundle, from_, to)
        return to_dict(apply_sliders(g, activity_pct, path_pct))

    @app.get("/api/adfg")
    def get_adfg(
        l_from: int = Query(),
        l_to: int = Query(),
        r_from: int = Query(),
        r_to: int = Query(),
        activity_pct: float = Query(default=1.0),
        path_pct: float = Query(default=1.0),
        agg: Optional[str] = Query(default=None),
        intervals: Optional[int] = Query(default=None),
    ) -> dict:
        agg_kind, n, sset = resolve(agg, intervals)
        _check(0.0 < activity_pct <= 1.0 and 0.0 < path_pct <= 1.0, "slider fractions must be in (0, 1]")
        bundle = active_bundle(agg_kind, n)
        left = range_dfg(sset, bundle, l_from, l_to)
        right = range_dfg(sset, bundle, r_from, r_to)
        return to_dict(filter_adfg(adfg(left, right), activity_pct, path_pct))

    @app.post("/api/forecast")
    def post_forecast(payload: dict = Body()) -> dict:
        family = payload.get("family")
        _check(isinstance(family, str) and family.strip() != "", "family is required")
        ts = payload.get("ts")
        h = payload.get("h")
        _check(isinstance(ts, int) and ts >= 1, "ts must be a positive integer")
        _check(isinstance(h, int) and h >= 1, "h must be a positive integer")
        order = payload.get("order")
        if order is not None:
            _check(
                isinstance(order, (list, tuple)) and len(order) == 3
                and all(isinstance(v, int) and v >= 0 for v in order),
                "order must be three non-negative integers",
            )
            order = tuple(order)
        try:
            spec = spec_from_label(family, horizon=h, order=order)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        _check(spec.family in FAMILIES, "unknown family")
        agg_kind, n, sset = resolve(payload.get("agg"), payload.get("intervals"))
        _check(ts <= n, f"ts must be at most the {n} available intervals")
        key: ForecastKey = (agg_kind, n, spec.family, spec.p, spec.d, spec.q, ts, h)
        with state.key_lock(key):
            bundle = state.forecast_cache.get(key)
            if bundle is None:
                try:
                    fc = forecast_dfg(sset, ts, spec, h=h, strict=state.strict)
                except SeriesTooShort as exc:
                    raise HTTPException(status_code=422, detail=str(exc)) from exc
                except ModelError as exc:
                    raise HTTPException(status_code=422, detail=str(exc)) from exc
                summary = {
                    "family": spec.family,
                    "order": [spec.p, spec.d, spec.q],
                    "ts": ts,
                    "h": h,
                    "aggregation": agg_kind,
                    "intervals": n,
                    "forecast_intervals": [n + 1, n + h],
                    "fallback_pairs": len(fc.fallback_pairs),
                    "relevance": None,
                }
                if ts + h <= n:
                    try:
                        sublog = window_sublog(state.log, sset.plan, ts + 1, ts + h)
                        actual = window_dfg(sset, ts + 1, ts + h)
                        summary["relevance"] = {
                            "actual": entropic_relevance(actual, sublog).relevance,
                            "forecast": entropic_relevance(
                                sum_dfgs(fc.dfgs), sublog
                            ).relevance,
                        }
                    except EmptyLog:
                        summary["relevance"] = None
                bundle = ForecastBundle(key=key, ts=ts, h=h, forecast=fc, summary=summary)
                state.forecast_cache[key] = bundle
        state.active_forecast[(agg_kind, n)] = key
        return bundle.summary

    if static_dir is not None:
        from pathlib import Path

        if Path(static_dir).is_dir():
            from fastapi.staticfiles import StaticFiles

            app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app

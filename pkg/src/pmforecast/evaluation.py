"""Rolling-window evaluation of forecasted process models.

For each training length a window of h test intervals slides backwards
over ten folds.  Per fold, the forecasted test-window DFG (edge-wise
sum of the h step forecasts) and the actual test-window DFG are both
reduced at each retention level and scored with entropic relevance
against the test-window sublog; the mean absolute percentage error
between the two relevance values is reported per cell.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings as _warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .aggregation import (
    build_series,
    collect_occurrences,
    plan_equisized,
    plan_equitemporal,
    window_dfg,
    window_sublog,
)
from .dfg import reduce_dfg
from .errors import EmptyLog, InvalidSplit, ModelError
from .event_log import EventLog
from .forecasting import (
    forecast_dfg,
    min_series_length,
    spec_from_label,
    sum_dfgs,
)
from .relevance import entropic_relevance

N_FOLDS = 10
DEFAULT_REDUCTIONS = (1.0, 0.5, 0.25)
#: relevance beyond this is treated as an exploded forecast (NA)
RELEVANCE_NA_THRESHOLD = 1.0e3


@dataclass(frozen=True)
class Fold:
    index: int
    train: tuple[int, int]
    test: tuple[int, int]

    @property
    def train_len(self) -> int:
        return self.train[1] - self.train[0] + 1


@dataclass(frozen=True)
class FoldPlan:
    s: int
    ts: int
    h: int
    folds: tuple[Fold, ...]


def make_folds(s: int, ts: int, h: int, n_folds: int = N_FOLDS) -> FoldPlan:
    """Rolling-window folds: with T = ts + h, fold f trains on intervals
    1..T-h-f and tests on T-h-f+1..T-f."""
    if ts < 1 or h < 1:
        raise InvalidSplit("ts and h must be >= 1")
    if ts + h > s:
        raise InvalidSplit(f"ts + h = {ts + h} exceeds the {s} available intervals")
    total = ts + h
    folds = []
    for f in range(n_folds):
        train_end = total - h - f
        if train_end < 1:
            raise InvalidSplit(f"fold {f} leaves no training intervals")
        folds.append(Fold(index=f, train=(1, train_end), test=(train_end + 1, total - f)))
    return FoldPlan(s=s, ts=ts, h=h, folds=tuple(folds))


@dataclass
class CellResult:
    mape: Optional[float]
    fold_relevance: list[tuple[Optional[float], Optional[float]]] = field(default_factory=list)


@dataclass
class EvalReport:
    log_name: str
    aggregation: str
    s: int
    h: int
    families: tuple[str, ...]
    ts_values: tuple[int, ...]
    reductions: tuple[float, ...]
    cells: dict[tuple[str, int, float], CellResult] = field(default_factory=dict)

    def mape(self, family: str, ts: int, reduction: float) -> Optional[float]:
        return self.cells[(family, ts, reduction)].mape


def _mape(pairs: Sequence[tuple[Optional[float], Optional[float]]]) -> Optional[float]:
    """Mean absolute percentage error, or None under the NA policy.

    Any fold with a missing, non-finite, exploded, or zero actual value
    makes the whole cell NA.
    """
    errors = []
    for actual, forecast in pairs:
        if actual is None or forecast is None:
            return None
        if not (math.isfinite(actual) and math.isfinite(forecast)):
            return None
        if actual > RELEVANCE_NA_THRESHOLD or forecast > RELEVANCE_NA_THRESHOLD:
            return None
        if actual == 0.0:
            return None
        errors.append(abs(actual - forecast) / abs(actual) * 100.0)
    if not errors:
        return None
    return sum(errors) / len(errors)


def evaluate(
    log: EventLog,
    aggregation: str,
    families: Sequence[str],
    ts_values: Sequence[int],
    reductions: Sequence[float] = DEFAULT_REDUCTIONS,
    s: int = 100,
    h: int = 25,
    *,
    strict: bool = True,
    per_step_relevance: bool = False,
    log_name: str = "log",
    exclude_endpoints: bool = False,
) -> EvalReport:
    """Run the full grid; cells that fail record NA instead of raising."""
    if aggregation == "equitemporal":
        plan = plan_equitemporal(log, s)
    elif aggregation == "equisized":
        plan = plan_equisized(log, s)
    else:
        raise ValueError(f"unknown aggregation {aggregation!r}")
    series = build_series(collect_occurrences(log), plan)
    report = EvalReport(
        log_name=log_name,
        aggregation=aggregation,
        s=s,
        h=h,
        families=tuple(families),
        ts_values=tuple(ts_values),
        reductions=tuple(reductions),
    )
    for ts in ts_values:
        fold_plan = make_folds(s, ts, h)
        for family in families:
            spec = spec_from_label(family, horizon=h)
            min_train = ts - (N_FOLDS - 1)
            if min_train < min_series_length(spec):
                _warnings.warn(
                    f"family {family!r}: shortest training window ({min_train}) is "
                    f"below the family minimum ({min_series_length(spec)})",
                    stacklevel=2,
                )
            per_reduction: dict[float, list] = {r: [] for r in reductions}
            for fold in fold_plan.folds:
                pairs = _fold_relevance(
                    series, log, plan, fold, spec, reductions,
                    strict=strict,
                    per_step=per_step_relevance,
                    exclude_endpoints=exclude_endpoints,
                )
                for r in reductions:
                    per_reduction[r].append(pairs[r])
            for r in reductions:
                report.cells[(family, ts, r)] = CellResult(
                    mape=_mape(per_reduction[r]), fold_relevance=per_reduction[r]
                )
    return report


def _score(g_actual, g_forecast, sublog, reduction: float):
    a = entropic_relevance(reduce_dfg(g_actual, reduction), sublog).relevance
    f = entropic_relevance(reduce_dfg(g_forecast, reduction), sublog).relevance
    return a, f


def _fold_relevance(
    series, log, plan, fold: Fold, spec, reductions, *, strict, per_step, exclude_endpoints
) -> dict[float, tuple[Optional[float], Optional[float]]]:
    lo, hi = fold.test
    na = {r: (None, None) for r in reductions}
    try:
        forecast = forecast_dfg(
            series, fold.train_len, spec, h=spec.horizon,
            strict=strict, exclude_endpoints=exclude_endpoints,
        )
    except ModelError:
        return na
    out: dict[float, tuple[Optional[float], Optional[float]]] = {}
    if per_step:
        for r in reductions:
            a_vals, f_vals = [], []
            for k, step_dfg in enumerate(forecast.dfgs):
                idx = lo + k
                try:
                    sub = window_sublog(log, plan, idx, idx)
                    a, f = _score(window_dfg(series, idx, idx), step_dfg, sub, r)
                except EmptyLog:
                    return na
                a_vals.append(a)
                f_vals.append(f)
            out[r] = (sum(a_vals) / len(a_vals), sum(f_vals) / len(f_vals))
        return out
    actual_dfg = window_dfg(series, lo, hi)
    forecast_window = sum_dfgs(forecast.dfgs)
    try:
        sublog = window_sublog(log, plan, lo, hi)
    except EmptyLog:
        return na
    for r in reductions:
        out[r] = _score(actual_dfg, forecast_window, sublog, r)
    return out


# ------------------------------------------------------------------ output


def _fmt_cell(value: Optional[float]) -> str:
    return "NA" if value is None else f"{value:.2f}"


def render_table(report: EvalReport) -> str:
    """Aligned text: one block per reduction, rows = families, cols = ts."""
    lines = [
        f"log={report.log_name} aggregation={report.aggregation} "
        f"s={report.s} h={report.h}"
    ]
    for r in report.reductions:
        lines.append("")
        lines.append(f"retained activity fraction {r:g}")
        header = ["family"] + [f"ts={ts}" for ts in report.ts_values]
        rows = [header]
        for family in report.families:
            row = [family]
            for ts in report.ts_values:
                row.append(_fmt_cell(report.cells[(family, ts, r)].mape))
            rows.append(row)
        widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
        for row in rows:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def report_to_csv(report: EvalReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["log", "aggregation", "family", "ts", "reduction", "mape"])
    for family in report.families:
        for ts in report.ts_values:
            for r in report.reductions:
                writer.writerow(
                    [
                        report.log_name,
                        report.aggregation,
                        family,
                        ts,
                        f"{r:g}",
                        _fmt_cell(report.cells[(family, ts, r)].mape),
                    ]
                )
    return out.getvalue()


def report_to_json(report: EvalReport) -> str:
    cells = []
    for (family, ts, r), cell in sorted(report.cells.items()):
        cells.append(
            {
                "family": family,
                "ts": ts,
                "reduction": r,
                "mape": cell.mape,
                "fold_relevance": [
                    {"actual": a, "forecast": f} for a, f in cell.fold_relevance
                ],
            }
        )
    return json.dumps(
        {
            "log": report.log_name,
            "aggregation": report.aggregation,
            "s": report.s,
            "h": report.h,
            "cells": cells,
        },
        indent=2,
    )

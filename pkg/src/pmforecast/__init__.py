"""Process model forecasting: DF time series, forecasted DFGs, entropic
relevance scoring, and a process-change exploration API."""

__version__ = "0.1.0"

from .aggregation import (
    DfOccurrence,
    DfSeriesSet,
    IntervalPlan,
    build_series,
    collect_occurrences,
    plan_equisized,
    plan_equitemporal,
    window_dfg,
    window_sublog,
)
from .dfg import ADfg, DFG, END, START, adfg, extract_dfg, reduce_dfg
from .event_log import Event, EventLog, Trace, parse_csv, parse_xes, validate
from .evaluation import EvalReport, FoldPlan, evaluate, make_folds, render_table
from .forecasting import (
    DfgForecast,
    ForecastResult,
    ForecastSpec,
    forecast_dfg,
    forecast_series,
    spec_from_label,
)
from .relevance import RelevanceReport, entropic_relevance

__all__ = [
    "ADfg",
    "DFG",
    "DfOccurrence",
    "DfSeriesSet",
    "DfgForecast",
    "END",
    "EvalReport",
    "Event",
    "EventLog",
    "FoldPlan",
    "ForecastResult",
    "ForecastSpec",
    "IntervalPlan",
    "RelevanceReport",
    "START",
    "Trace",
    "adfg",
    "build_series",
    "collect_occurrences",
    "entropic_relevance",
    "evaluate",
    "extract_dfg",
    "forecast_dfg",
    "forecast_series",
    "make_folds",
    "parse_csv",
    "parse_xes",
    "plan_equisized",
    "plan_equitemporal",
    "reduce_dfg",
    "render_table",
    "spec_from_label",
    "validate",
    "window_dfg",
    "window_sublog",
]

"""Command-line entry point.

Subcommands: ``series`` (export DF time series), ``forecast`` (write
forecasted DFGs), ``evaluate`` (rolling-window MAPE tables) and
``serve`` (HTTP API for the exploration UI).

Exit codes: 0 ok, 2 input error, 3 model error in strict mode,
4 environment error (e.g. port already in use).
"""

from __future__ import annotations

import argparse
import socket
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .aggregation import (
    build_series,
    collect_occurrences,
    export_series_csv,
    plan_equisized,
    plan_equitemporal,
)
from .dfg import export_dot, export_json
from .errors import InputError, ModelError
from .evaluation import (
    DEFAULT_REDUCTIONS,
    evaluate,
    render_table,
    report_to_csv,
    report_to_json,
)
from .event_log import ISO_FORMAT, EventLog, parse_csv, parse_xes
from .forecasting import forecast_dfg, spec_from_label, sum_dfgs

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MODEL = 3
EXIT_ENV = 4


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _order(text: str) -> tuple[int, int, int]:
    parts = [int(v) for v in text.split(",")]
    if len(parts) != 3 or min(parts) < 0:
        raise argparse.ArgumentTypeError("order must be p,d,q with non-negative integers")
    return parts[0], parts[1], parts[2]


def _csv_list(text: str) -> list[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="event log file")
    parser.add_argument("--format", choices=("csv", "xes"), default=None,
                        help="input format (default: by file extension)")
    parser.add_argument("--columns", default="case,activity,timestamp",
                        help="CSV column names: case,activity,timestamp")
    parser.add_argument("--timestamp-format", default=ISO_FORMAT,
                        help="strptime pattern, or 'iso' (default)")
    parser.add_argument("--agg", choices=("equitemporal", "equisized"),
                        default="equisized")
    parser.add_argument("--intervals", type=_positive_int, default=100,
                        help="number of intervals s")
    parser.add_argument("--out", default=".", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pmforecast",
                                     description="Forecast whole process models from event logs.")
    parser.add_argument("--version", action="version", version=f"pmforecast {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_series = sub.add_parser("series", help="export DF time series as wide CSV")
    _add_common(p_series)

    p_fc = sub.add_parser("forecast", help="forecast DFGs for h future intervals")
    _add_common(p_fc)
    p_fc.add_argument("--family", default="naive")
    p_fc.add_argument("--order", type=_order, default=None, metavar="p,d,q")
    p_fc.add_argument("--ts", type=_positive_int, default=None,
                      help="training length (default: all intervals)")
    p_fc.add_argument("--horizon", type=_positive_int, default=1)
    p_fc.add_argument("--strict", action="store_true",
                      help="fail on non-convergence instead of falling back")
    p_fc.add_argument("--exclude-endpoints", action="store_true",
                      help="do not forecast trace entry/exit arcs")

    p_eval = sub.add_parser("evaluate", help="rolling-window MAPE of entropic relevance")
    _add_common(p_eval)
    p_eval.add_argument("--family", default="nav,arima212,ar2,hw,garch",
                        help="comma-separated family labels")
    p_eval.add_argument("--ts", default="25,50,75", help="comma-separated training lengths")
    p_eval.add_argument("--horizon", type=_positive_int, default=25)
    p_eval.add_argument("--reduce", default="1.0,0.5,0.25",
                        help="comma-separated retained activity fractions")
    p_eval.add_argument("--strict", action="store_true", default=True,
                        help="propagate non-convergence as NA (default)")
    p_eval.add_argument("--no-strict", dest="strict", action="store_false",
                        help="fall back to naive instead of NA")
    p_eval.add_argument("--per-step", action="store_true",
                        help="average relevance per forecast step instead of once per window")
    p_eval.add_argument("--exclude-endpoints", action="store_true")

    p_serve = sub.add_parser("serve", help="serve the exploration API and UI")
    _add_common(p_serve)
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--strict", action="store_true")
    p_serve.add_argument("--static", default=None,
                         help="directory with the built UI bundle")
    return parser


def load_log(args: argparse.Namespace) -> EventLog:
    path = Path(args.input)
    if not path.is_file():
        raise InputError(f"input file not found: {path}")
    fmt = args.format or ("xes" if path.suffix.lower() == ".xes" else "csv")
    data = path.read_bytes()
    if fmt == "xes":
        return parse_xes(data)
    columns = _csv_list(args.columns)
    if len(columns) != 3:
        raise InputError("--columns must name exactly case,activity,timestamp")
    return parse_csv(data, columns=columns, timestamp_format=args.timestamp_format)


def _plan_and_series(log: EventLog, agg: str, s: int):
    plan = plan_equitemporal(log, s) if agg == "equitemporal" else plan_equisized(log, s)
    return build_series(collect_occurrences(log), plan)


def cmd_series(args: argparse.Namespace) -> int:
    log = load_log(args)
    series = _plan_and_series(log, args.agg, args.intervals)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / "series.csv"
    target.write_text(export_series_csv(series), encoding="utf-8")
    print(f"wrote {target}")
    return EXIT_OK


def cmd_forecast(args: argparse.Namespace) -> int:
    log = load_log(args)
    series = _plan_and_series(log, args.agg, args.intervals)
    ts = args.ts if args.ts is not None else series.s
    if ts > series.s:
        raise InputError(f"--ts {ts} exceeds the {series.s} available intervals")
    spec = spec_from_label(args.family, horizon=args.horizon, order=args.order)
    result = forecast_dfg(
        series, ts, spec, h=args.horizon,
        strict=args.strict, exclude_endpoints=args.exclude_endpoints,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = ["from,to,step,value,model_used"]
    for pair in sorted(result.results):
        res = result.results[pair]
        for k, value in enumerate(res.values, start=1):
            rows.append(f"{pair[0]},{pair[1]},{k},{float(value)!r},{res.model_used}")
    (out_dir / "forecast.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    for k, g in enumerate(result.dfgs, start=1):
        (out_dir / f"dfg_step_{k:03d}.json").write_text(export_json(g), encoding="utf-8")
        (out_dir / f"dfg_step_{k:03d}.dot").write_text(export_dot(g), encoding="utf-8")
    window = sum_dfgs(result.dfgs)
    (out_dir / "dfg_window.json").write_text(export_json(window), encoding="utf-8")
    (out_dir / "dfg_window.dot").write_text(export_dot(window), encoding="utf-8")
    print(f"wrote forecast for {len(result.results)} pairs, horizon {args.horizon}, to {out_dir}")
    if result.fallback_pairs:
        print(f"fallback applied to {len(result.fallback_pairs)} pairs")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    log = load_log(args)
    families = _csv_list(args.family)
    ts_values = [int(v) for v in _csv_list(args.ts)]
    reductions = tuple(float(v) for v in _csv_list(args.reduce)) or DEFAULT_REDUCTIONS
    report = evaluate(
        log,
        args.agg,
        families,
        ts_values,
        reductions,
        s=args.intervals,
        h=args.horizon,
        strict=args.strict,
        per_step_relevance=args.per_step,
        log_name=Path(args.input).stem,
        exclude_endpoints=args.exclude_endpoints,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"eval_{report.log_name}_{args.agg}"
    (out_dir / f"{stem}.json").write_text(report_to_json(report), encoding="utf-8")
    (out_dir / f"{stem}.csv").write_text(report_to_csv(report), encoding="utf-8")
    table = render_table(report)
    (out_dir / f"{stem}.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return EXIT_OK


def _port_free(host: str, port: int) -> bool:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            sock.bind((host, port))
        except OSError:
            return False
    return True


def cmd_serve(args: argparse.Namespace) -> int:
    log = load_log(args)
    if not _port_free(args.host, args.port):
        print(f"port {args.port} is already in use", file=sys.stderr)
        return EXIT_ENV
    from .api_server import create_app

    app = create_app(
        log,
        s=args.intervals,
        default_agg=args.agg,
        strict=args.strict,
        static_dir=args.static,
    )
    import uvicorn

    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    except OSError as exc:
        print(f"cannot serve on {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_ENV
    return EXIT_OK


_COMMANDS = {
    "series": cmd_series,
    "forecast": cmd_forecast,
    "evaluate": cmd_evaluate,
    "serve": cmd_serve,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())

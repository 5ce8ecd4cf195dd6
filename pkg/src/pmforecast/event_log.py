"""Event log parsing and validation.

Logs arrive as CSV (case / activity / timestamp columns) or as a minimal
XES subset.  Parsed logs are immutable: events are grouped into traces,
ordered by timestamp with file order breaking ties, and the activity
alphabet and covered time span are precomputed.
"""

from __future__ import annotations

import csv
import io
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO, Iterable, Sequence

from .errors import (
    EmptyLog,
    MalformedXml,
    MissingAttribute,
    MissingColumn,
    UnparseableTimestamp,
)

ISO_FORMAT = "iso"

DEFAULT_COLUMNS = ("case", "activity", "timestamp")


@dataclass(frozen=True)
class Event:
    case_id: str
    activity: str
    timestamp: datetime
    #: original file position; orders timestamp ties but is not identity
    seq_no: int = field(compare=False)


@dataclass(frozen=True)
class Trace:
    case_id: str
    events: tuple[Event, ...]

    def __len__(self) -> int:
        return len(self.events)

    @property
    def activities(self) -> tuple[str, ...]:
        return tuple(e.activity for e in self.events)


@dataclass(frozen=True)
class EventLog:
    traces: tuple[Trace, ...]
    alphabet: frozenset[str]
    time_span: tuple[datetime, datetime]

    def __len__(self) -> int:
        return len(self.traces)

    @property
    def n_events(self) -> int:
        return sum(len(t) for t in self.traces)


@dataclass(frozen=True)
class Warning:
    kind: str
    message: str


def _to_utc(ts: datetime) -> datetime:
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def parse_timestamp(value: str, pattern: str = ISO_FORMAT) -> datetime:
    """Parse one timestamp; naive values are taken as UTC."""
    if pattern == ISO_FORMAT:
        text = value.strip()
        # Python 3.10 fromisoformat does not accept a trailing Z.
        if text.endswith(("Z", "z")):
            text = text[:-1] + "+00:00"
        ts = datetime.fromisoformat(text)
    else:
        ts = datetime.strptime(value.strip(), pattern)
    return _to_utc(ts)


def build_log(events: Iterable[Event]) -> EventLog:
    """Group events into traces and derive alphabet and time span.

    Trace order follows first appearance of each case; within a trace,
    events are sorted by timestamp with the original position (seq_no)
    breaking ties.
    """
    by_case: dict[str, list[Event]] = {}
    for ev in events:
        by_case.setdefault(ev.case_id, []).append(ev)
    if not by_case:
        raise EmptyLog("log contains no events")
    traces = []
    for case_id, evs in by_case.items():
        evs.sort(key=lambda e: (e.timestamp, e.seq_no))
        traces.append(Trace(case_id=case_id, events=tuple(evs)))
    all_events = [e for t in traces for e in t.events]
    alphabet = frozenset(e.activity for e in all_events)
    lo = min(e.timestamp for e in all_events)
    hi = max(e.timestamp for e in all_events)
    return EventLog(traces=tuple(traces), alphabet=alphabet, time_span=(lo, hi))


def _decode(source: bytes | str | IO) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def parse_csv(
    source: bytes | str | IO,
    columns: Sequence[str] = DEFAULT_COLUMNS,
    timestamp_format: str = ISO_FORMAT,
) -> EventLog:
    """Parse a CSV event log (RFC 4180, header row required).

    ``columns`` names the case, activity and timestamp columns, in that
    order.  Raises MissingColumn, UnparseableTimestamp or EmptyLog.
    """
    case_col, act_col, ts_col = columns
    reader = csv.DictReader(io.StringIO(_decode(source)))
    header = reader.fieldnames or []
    for col in (case_col, act_col, ts_col):
        if col not in header:
            raise MissingColumn(col)
    events = []
    for i, row in enumerate(reader):
        raw_ts = row[ts_col]
        try:
            ts = parse_timestamp(raw_ts, timestamp_format)
        except (ValueError, TypeError):
            # +2: one for the header, one for 1-based numbering
            raise UnparseableTimestamp(i + 2, raw_ts, timestamp_format) from None
        activity = row[act_col]
        if not activity:
            raise MissingColumn(act_col)
        events.append(
            Event(case_id=row[case_col], activity=activity, timestamp=ts, seq_no=i)
        )
    if not events:
        raise EmptyLog("CSV contains a header but no event rows")
    return build_log(events)


def export_csv(log: EventLog, columns: Sequence[str] = DEFAULT_COLUMNS) -> str:
    """Inverse of parse_csv: re-parsing the output yields an equal log."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(list(columns))
    for trace in log.traces:
        for ev in trace.events:
            writer.writerow([ev.case_id, ev.activity, ev.timestamp.isoformat()])
    return out.getvalue()


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_xes(source: bytes | str | IO) -> EventLog:
    """Parse a minimal XES subset.

    Only the string attribute ``concept:name`` and the date attribute
    ``time:timestamp`` of each event are read; everything else,
    including lifecycle transitions, is ignored.
    """
    try:
        root = ET.fromstring(_decode(source))
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc
    events: list[Event] = []
    seq_no = 0
    trace_count = 0
    for trace_el in root.iter():
        if _local_name(trace_el.tag) != "trace":
            continue
        trace_index = trace_count
        trace_count += 1
        case_id = f"trace-{trace_index}"
        for child in trace_el:
            if _local_name(child.tag) == "string" and child.get("key") == "concept:name":
                case_id = child.get("value", case_id)
        event_index = 0
        for ev_el in trace_el:
            if _local_name(ev_el.tag) != "event":
                continue
            activity = None
            ts = None
            for attr in ev_el:
                key = attr.get("key")
                if key == "concept:name" and _local_name(attr.tag) == "string":
                    activity = attr.get("value")
                elif key == "time:timestamp" and _local_name(attr.tag) == "date":
                    ts = attr.get("value")
            if activity is None:
                raise MissingAttribute(trace_index, event_index, "concept:name")
            if ts is None:
                raise MissingAttribute(trace_index, event_index, "time:timestamp")
            try:
                timestamp = parse_timestamp(ts)
            except ValueError:
                raise MissingAttribute(trace_index, event_index, "time:timestamp") from None
            events.append(
                Event(case_id=case_id, activity=activity, timestamp=timestamp, seq_no=seq_no)
            )
            seq_no += 1
            event_index += 1
    if trace_count == 0 or not events:
        raise EmptyLog("XES document contains no traces with events")
    return build_log(events)


def validate(log: EventLog) -> list[Warning]:
    """Non-mutating sanity checks; returns warnings, never raises."""
    warnings: list[Warning] = []
    for trace in log.traces:
        if len(trace) == 1:
            warnings.append(
                Warning(
                    kind="SingleEventTrace",
                    message=f"case {trace.case_id!r} has a single event and "
                    "contributes no activity-to-activity pairs",
                )
            )
    by_stripped: dict[str, set[str]] = {}
    for name in log.alphabet:
        by_stripped.setdefault(name.strip(), set()).add(name)
    for stripped, variants in sorted(by_stripped.items()):
        if len(variants) > 1:
            listed = ", ".join(repr(v) for v in sorted(variants))
            warnings.append(
                Warning(
                    kind="SuspiciousName",
                    message=f"activities differing only by whitespace: {listed}",
                )
            )
    return warnings

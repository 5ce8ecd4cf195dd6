"""Split directly-follows occurrences into intervals and build time series.

Two interval plans are supported: equitemporal (the log's time span is
cut into stretches of equal duration) and equisized (the chronological
occurrence stream is cut into blocks holding equal numbers of
activity-to-activity occurrences).  Counting one pair per interval
yields one integer series per pair.
"""

from __future__ import annotations

import bisect
import csv
import io
from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Literal, Optional

import numpy as np

from .dfg import DFG, END, START, Pair, make_dfg
from .errors import EmptyLog, TooFewOccurrences, ZeroDuration
from .event_log import EventLog, Trace, build_log


@dataclass(frozen=True)
class DfOccurrence:
    pair: Pair
    anchor_time: datetime
    case_id: str

    @property
    def is_endpoint(self) -> bool:
        return self.pair[0] == START or self.pair[1] == END


@dataclass(frozen=True)
class IntervalPlan:
    kind: Literal["equitemporal", "equisized"]
    s: int
    #: equitemporal: s+1 instants bounding half-open intervals (last closed)
    boundaries: Optional[tuple[datetime, ...]] = None
    #: equisized: [start, end) indices into the sorted activity-pair stream
    index_ranges: Optional[tuple[tuple[int, int], ...]] = None
    #: equisized: (first, last) anchor instant per block
    time_ranges: Optional[tuple[tuple[datetime, datetime], ...]] = None


@dataclass(frozen=True)
class DfSeriesSet:
    s: int
    series: dict[Pair, np.ndarray]
    plan: IntervalPlan

    def pairs(self) -> list[Pair]:
        return sorted(self.series)

    def alphabet(self) -> frozenset[str]:
        names = {n for pair in self.series for n in pair}
        return frozenset(names - {START, END})


def _occ_key(o: DfOccurrence) -> tuple:
    return (o.anchor_time, o.case_id, o.pair)


def collect_occurrences(log: EventLog) -> list[DfOccurrence]:
    """One occurrence per directly-follows pair.

    Activity-to-activity pairs are anchored at the *second* event's
    timestamp; the start arc at the first event, the end arc at the
    last.  Sorted by (anchor time, case, pair).
    """
    occurrences: list[DfOccurrence] = []
    for trace in log.traces:
        events = trace.events
        occurrences.append(
            DfOccurrence((START, events[0].activity), events[0].timestamp, trace.case_id)
        )
        for i in range(len(events) - 1):
            occurrences.append(
                DfOccurrence(
                    (events[i].activity, events[i + 1].activity),
                    events[i + 1].timestamp,
                    trace.case_id,
                )
            )
        occurrences.append(
            DfOccurrence((events[-1].activity, END), events[-1].timestamp, trace.case_id)
        )
    occurrences.sort(key=_occ_key)
    return occurrences


def plan_equitemporal(log: EventLog, s: int) -> IntervalPlan:
    """s intervals of equal duration spanning the log exactly."""
    if s < 1:
        raise ValueError("s must be >= 1")
    lo, hi = log.time_span
    if hi <= lo:
        raise ZeroDuration("log spans no time; equitemporal intervals are undefined")
    span = hi - lo
    boundaries = tuple(lo + (span * i) / s for i in range(s + 1))
    for a, b in zip(boundaries, boundaries[1:]):
        if b <= a:
            raise ZeroDuration(f"time span too short for {s} distinct intervals")
    return IntervalPlan(kind="equitemporal", s=s, boundaries=boundaries)


def plan_equisized(log: EventLog, s: int) -> IntervalPlan:
    """s contiguous blocks of the activity-pair stream, sizes differing by <= 1.

    Block sizes are ceil(N/s) for the first N mod s blocks and floor(N/s)
    after; start/end arcs do not count towards N.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    inner = [o for o in collect_occurrences(log) if not o.is_endpoint]
    n = len(inner)
    if n < s:
        raise TooFewOccurrences(
            f"{n} activity-pair occurrences cannot fill {s} intervals"
        )
    base, rem = divmod(n, s)
    sizes = [base + 1] * rem + [base] * (s - rem)
    index_ranges = []
    time_ranges = []
    pos = 0
    for size in sizes:
        index_ranges.append((pos, pos + size))
        block = inner[pos : pos + size]
        time_ranges.append((block[0].anchor_time, block[-1].anchor_time))
        pos += size
    return IntervalPlan(
        kind="equisized",
        s=s,
        index_ranges=tuple(index_ranges),
        time_ranges=tuple(time_ranges),
    )


def _equitemporal_index(boundaries: tuple[datetime, ...], t: datetime) -> int:
    idx = bisect.bisect_right(boundaries, t) - 1
    # the final interval is closed on the right
    return min(max(idx, 0), len(boundaries) - 2)


def _equisized_block(plan: IntervalPlan, t: datetime) -> int:
    assert plan.time_ranges is not None
    for i, (_, last) in enumerate(plan.time_ranges):
        if t <= last:
            return i
    return plan.s - 1


def build_series(occurrences: Iterable[DfOccurrence], plan: IntervalPlan) -> DfSeriesSet:
    """Count occurrences per pair per interval; absent combinations are 0."""
    occs = sorted(occurrences, key=_occ_key)
    assignments: list[tuple[Pair, int]] = []
    if plan.kind == "equitemporal":
        assert plan.boundaries is not None
        for o in occs:
            assignments.append((o.pair, _equitemporal_index(plan.boundaries, o.anchor_time)))
    else:
        assert plan.index_ranges is not None
        inner = [o for o in occs if not o.is_endpoint]
        for (start, end), block in zip(plan.index_ranges, range(plan.s)):
            for o in inner[start:end]:
                assignments.append((o.pair, block))
        for o in occs:
            if o.is_endpoint:
                assignments.append((o.pair, _equisized_block(plan, o.anchor_time)))
    series: dict[Pair, np.ndarray] = {}
    for pair, idx in assignments:
        if pair not in series:
            series[pair] = np.zeros(plan.s, dtype=np.int64)
        series[pair][idx] += 1
    return DfSeriesSet(s=plan.s, series=series, plan=plan)


def window_dfg(series_set: DfSeriesSet, lo: int, hi: int) -> DFG:
    """DFG of intervals lo..hi (1-based, inclusive): per-pair interval sums."""
    if not 1 <= lo <= hi <= series_set.s:
        raise ValueError(f"interval range [{lo}, {hi}] outside 1..{series_set.s}")
    edges = {
        pair: float(values[lo - 1 : hi].sum())
        for pair, values in series_set.series.items()
    }
    return make_dfg(edges, series_set.alphabet())


def window_time_bounds(plan: IntervalPlan, lo: int, hi: int) -> tuple[datetime, datetime, bool]:
    """Time bounds of intervals lo..hi: (start, end, end_inclusive)."""
    if not 1 <= lo <= hi <= plan.s:
        raise ValueError(f"interval range [{lo}, {hi}] outside 1..{plan.s}")
    if plan.kind == "equitemporal":
        assert plan.boundaries is not None
        return plan.boundaries[lo - 1], plan.boundaries[hi], hi == plan.s
    assert plan.time_ranges is not None
    return plan.time_ranges[lo - 1][0], plan.time_ranges[hi - 1][1], True


def window_sublog(log: EventLog, plan: IntervalPlan, lo: int, hi: int) -> EventLog:
    """Trace fragments whose events fall within the window's time bounds.

    Traces entirely outside the window are dropped; fragments keep their
    case ids and act as complete traces downstream.  Windows touching
    the first or last interval stretch to the log's own bounds, so the
    full range always reproduces the whole log.  Raises EmptyLog if
    nothing remains.
    """
    start, end, inclusive = window_time_bounds(plan, lo, hi)
    if lo == 1:
        start = min(start, log.time_span[0])
    if hi == plan.s:
        end = max(end, log.time_span[1])
        inclusive = True

    def inside(t: datetime) -> bool:
        if t < start:
            return False
        return t <= end if inclusive else t < end

    fragments = []
    for trace in log.traces:
        kept = tuple(e for e in trace.events if inside(e.timestamp))
        if kept:
            fragments.append(Trace(case_id=trace.case_id, events=kept))
    if not fragments:
        raise EmptyLog(f"no events in intervals [{lo}, {hi}]")
    return build_log(e for t in fragments for e in t.events)


def interval_totals(series_set: DfSeriesSet) -> np.ndarray:
    """Activity-pair occurrences per interval (start/end arcs excluded)."""
    totals = np.zeros(series_set.s, dtype=np.int64)
    for pair, values in series_set.series.items():
        if pair[0] != START and pair[1] != END:
            totals += values
    return totals


def export_series_csv(series_set: DfSeriesSet) -> str:
    """Wide CSV: from,to,v1..vs — one row per pair."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["from", "to"] + [f"v{i}" for i in range(1, series_set.s + 1)])
    for pair in series_set.pairs():
        writer.writerow([pair[0], pair[1]] + [int(v) for v in series_set.series[pair]])
    return out.getvalue()

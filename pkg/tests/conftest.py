from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from pmforecast.event_log import Event, EventLog, build_log, parse_csv

MINUTE = timedelta(minutes=1)

# The running example used throughout the suite: three traces over two
# activities, 75 minutes from 11:30 to 12:45.
TABLE1_CSV = """case,activity,timestamp
1,a1,1970-01-01T11:30:00
1,a2,1970-01-01T11:45:00
1,a1,1970-01-01T12:10:00
1,a2,1970-01-01T12:15:00
2,a1,1970-01-01T11:40:00
2,a1,1970-01-01T11:55:00
3,a1,1970-01-01T12:20:00
3,a2,1970-01-01T12:40:00
3,a2,1970-01-01T12:45:00
"""

EQUITEMPORAL_3 = {
    ("a1", "a1"): [0, 1, 0],
    ("a1", "a2"): [1, 1, 1],
    ("a2", "a1"): [0, 1, 0],
    ("a2", "a2"): [0, 0, 1],
}

EQUISIZED_3 = {
    ("a1", "a1"): [1, 0, 0],
    ("a1", "a2"): [1, 1, 1],
    ("a2", "a1"): [0, 1, 0],
    ("a2", "a2"): [0, 0, 1],
}


@pytest.fixture
def table1_csv() -> str:
    return TABLE1_CSV


@pytest.fixture
def table1_log() -> EventLog:
    return parse_csv(TABLE1_CSV)


def make_log(traces: list[list[str]], minutes_apart: int = 1) -> EventLog:
    """Tiny in-memory log; event k of the whole stream is k minutes in."""
    events = []
    seq = 0
    t0 = datetime(2021, 1, 1, tzinfo=timezone.utc)
    for case_no, acts in enumerate(traces):
        for act in acts:
            events.append(
                Event(
                    case_id=f"c{case_no}",
                    activity=act,
                    timestamp=t0 + (seq * minutes_apart) * MINUTE,
                    seq_no=seq,
                )
            )
            seq += 1
    return build_log(events)


def markov_log(
    n_traces: int,
    seed: int,
    activities: tuple[str, ...] = ("a", "b", "c", "d", "e"),
    stop_prob: float = 0.25,
    max_len: int = 12,
) -> EventLog:
    """Stationary Markov-chain log: fixed transition matrix, fixed seed.

    The chain is time-homogeneous and arrivals are evenly spaced, so
    every DF series is close to constant over time.
    """
    rng = np.random.default_rng(seed)
    k = len(activities)
    # fixed row-stochastic matrix, deterministic given k
    raw = 1.0 + (np.arange(k * k, dtype=float).reshape(k, k) % 3)
    matrix = raw / raw.sum(axis=1, keepdims=True)
    start = np.full(k, 1.0 / k)
    events = []
    seq = 0
    t0 = datetime(2021, 1, 1, tzinfo=timezone.utc)
    for case_no in range(n_traces):
        state = rng.choice(k, p=start)
        acts = [activities[state]]
        while len(acts) < max_len and rng.random() > stop_prob:
            state = rng.choice(k, p=matrix[state])
            acts.append(activities[state])
        base = case_no * 100
        for j, act in enumerate(acts):
            events.append(
                Event(
                    case_id=f"case{case_no}",
                    activity=act,
                    timestamp=t0 + (base + j) * MINUTE,
                    seq_no=seq,
                )
            )
            seq += 1
    return build_log(events)

"""Entropic relevance of a DFG with respect to an event log.

The DFG is read as a stochastic process: out-edge weights of each node
are normalized into transition probabilities, and a trace that the
graph can replay costs the number of bits of its path probability.
Traces the graph cannot replay are charged a uniform background code
over the joint alphabet plus a stop symbol.  The reported value is the
average number of bits per trace (plus the one-bit-style overhead of
telling fitting from non-fitting traces); lower is better.  Edge
weights may be real-valued, so forecasted graphs are scored directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .dfg import DFG, END, START
from .errors import EmptyLog
from .event_log import EventLog, Trace


@dataclass(frozen=True)
class RelevanceReport:
    relevance: float
    rho: float
    fitting_cost_total: float
    background_cost_total: float
    n_traces: int

    def to_json(self) -> dict:
        return {
            "relevance": self.relevance,
            "rho": self.rho,
            "n_traces": self.n_traces,
            "fitting_bits": self.fitting_cost_total,
            "background_bits": self.background_cost_total,
        }


def binary_entropy(rho: float) -> float:
    if rho <= 0.0 or rho >= 1.0:
        return 0.0
    return -rho * math.log2(rho) - (1.0 - rho) * math.log2(1.0 - rho)


def transition_probabilities(g: DFG) -> dict[str, dict[str, float]]:
    """Out-edge weights normalized per node; sinks get an empty map."""
    totals: dict[str, float] = {}
    for (a, _), w in g.edges.items():
        totals[a] = totals.get(a, 0.0) + w
    probs: dict[str, dict[str, float]] = {n: {} for n in g.activities | {START, END}}
    for (a, b), w in g.edges.items():
        probs.setdefault(a, {})[b] = w / totals[a]
    return probs


def _activities_of(trace: Trace | Sequence[str]) -> tuple[str, ...]:
    if isinstance(trace, Trace):
        return trace.activities
    return tuple(trace)


def trace_cost(
    trace: Trace | Sequence[str],
    g: DFG,
    alphabet: Optional[Iterable[str]] = None,
    _probs: Optional[dict[str, dict[str, float]]] = None,
) -> tuple[bool, float]:
    """(fits, bits) of encoding one trace with the graph.

    A trace fits iff every step, including trace entry and exit, runs
    along a positive-weight edge; its cost is the negative log2 path
    probability.  Non-fitting traces cost (n+1) * log2(|A| + 1) bits,
    where A defaults to the union of the model's and the trace's
    activities.
    """
    acts = _activities_of(trace)
    probs = _probs if _probs is not None else transition_probabilities(g)
    path = [(START, acts[0])]
    path += [(acts[i], acts[i + 1]) for i in range(len(acts) - 1)]
    path.append((acts[-1], END))
    bits = 0.0
    fits = True
    for a, b in path:
        p = probs.get(a, {}).get(b, 0.0)
        if p <= 0.0:
            fits = False
            break
        bits -= math.log2(p)
    if fits:
        return True, bits
    background = set(alphabet) if alphabet is not None else g.activities | set(acts)
    return False, (len(acts) + 1) * math.log2(len(background) + 1)


def entropic_relevance(g: DFG, log: EventLog) -> RelevanceReport:
    """Average bits per trace; identical traces each count.

    relevance = H0(rho) + (fitting bits + background bits) / n, where
    rho is the fraction of fitting traces and H0 the binary entropy.
    """
    if not log.traces:
        raise EmptyLog("entropic relevance of an empty log is undefined")
    probs = transition_probabilities(g)
    alphabet = g.activities | set(log.alphabet)
    n = len(log.traces)
    n_fit = 0
    fit_bits = 0.0
    bg_bits = 0.0
    for trace in log.traces:
        fits, bits = trace_cost(trace, g, alphabet=alphabet, _probs=probs)
        if fits:
            n_fit += 1
            fit_bits += bits
        else:
            bg_bits += bits
    rho = n_fit / n
    relevance = binary_entropy(rho) + (fit_bits + bg_bits) / n
    return RelevanceReport(
        relevance=relevance,
        rho=rho,
        fitting_cost_total=fit_bits,
        background_cost_total=bg_bits,
        n_traces=n,
    )

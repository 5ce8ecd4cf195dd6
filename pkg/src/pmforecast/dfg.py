"""Weighted directly-follows graphs.

A DFG counts, for every pair of activities, how often the first is
immediately followed by the second within a trace.  Artificial start
and end nodes are added so that trace entry and exit arcs take part in
aggregation and forecasting like any other pair.  Edge weights may be
real-valued (forecasted graphs).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import EmptyLog
from .event_log import EventLog

START = "__START__"
END = "__END__"

#: display glyphs for the artificial endpoints
GLYPHS = {START: "▶", END: "■"}

Pair = tuple[str, str]


@dataclass(frozen=True)
class DFG:
    activities: frozenset[str]
    edges: Mapping[Pair, float]
    node_freq: Mapping[str, float]

    def weight(self, a: str, b: str) -> float:
        return self.edges.get((a, b), 0.0)


@dataclass(frozen=True)
class ADfg:
    """Union of two DFGs with both ranges' numbers kept per node/edge."""

    activities: frozenset[str]
    edges: Mapping[Pair, tuple[float, float]]
    node_values: Mapping[str, tuple[float, float]]


def make_dfg(edges: Mapping[Pair, float], activities: Iterable[str] = ()) -> DFG:
    """Build a DFG from edge weights.

    Zero-weight edges are dropped; node frequencies are the inbound
    weight sums (for the start node, the outbound sum, since nothing
    enters it).  ``activities`` may add isolated nodes.
    """
    clean: dict[Pair, float] = {}
    for (a, b), w in edges.items():
        if w < 0:
            raise ValueError(f"negative weight on edge {(a, b)}")
        if b == START or a == END:
            raise ValueError(f"edge {(a, b)} enters start or leaves end")
        if w > 0:
            clean[(a, b)] = float(w)
    acts = set(activities) - {START, END}
    for a, b in clean:
        acts.update(n for n in (a, b) if n not in (START, END))
    freq: dict[str, float] = {n: 0.0 for n in acts}
    freq[START] = 0.0
    freq[END] = 0.0
    for (a, b), w in clean.items():
        freq[b] += w
        if a == START:
            freq[START] += w
    return DFG(activities=frozenset(acts), edges=clean, node_freq=freq)


def extract_dfg(log: EventLog) -> DFG:
    """Count directly-follows pairs, plus one start and one end arc per trace."""
    if not log.traces:
        raise EmptyLog("cannot extract a DFG from an empty log")
    edges: dict[Pair, float] = {}

    def bump(a: str, b: str) -> None:
        edges[(a, b)] = edges.get((a, b), 0.0) + 1.0

    for trace in log.traces:
        acts = trace.activities
        bump(START, acts[0])
        for i in range(len(acts) - 1):
            bump(acts[i], acts[i + 1])
        bump(acts[-1], END)
    return make_dfg(edges, log.alphabet)


def reduce_dfg(g: DFG, retain_fraction: float) -> DFG:
    """Keep only the most frequent activities.

    Retains the ceil(retain_fraction * n) highest-frequency activities
    (ties keep the lexicographically smaller name); start and end nodes
    always survive.  Edges touching removed nodes are dropped with no
    re-connection.
    """
    if not 0.0 < retain_fraction <= 1.0:
        raise ValueError("retain_fraction must be in (0, 1]")
    ranked = sorted(g.activities, key=lambda a: (-g.node_freq.get(a, 0.0), a))
    keep_n = math.ceil(retain_fraction * len(ranked))
    kept = set(ranked[:keep_n]) | {START, END}
    edges = {(a, b): w for (a, b), w in g.edges.items() if a in kept and b in kept}
    return make_dfg(edges, kept - {START, END})


def filter_paths(g: DFG, retain_fraction: float) -> DFG:
    """Keep the heaviest fraction of edges.

    Retains the ceil(retain_fraction * m) highest-weight edges, and
    additionally each node's single heaviest incoming and outgoing edge
    so nodes stay reachable from the start and connected to the end
    where the original graph allows it.
    """
    if not 0.0 < retain_fraction <= 1.0:
        raise ValueError("retain_fraction must be in (0, 1]")
    ranked = sorted(g.edges.items(), key=lambda kv: (-kv[1], kv[0]))
    keep_m = math.ceil(retain_fraction * len(ranked))
    kept = {pair for pair, _ in ranked[:keep_m]}
    best_in: dict[str, Pair] = {}
    best_out: dict[str, Pair] = {}
    for pair, _ in ranked:
        a, b = pair
        best_out.setdefault(a, pair)
        best_in.setdefault(b, pair)
    for node in g.activities:
        if node in best_in:
            kept.add(best_in[node])
        if node in best_out:
            kept.add(best_out[node])
    return make_dfg({p: g.edges[p] for p in kept}, g.activities)


def apply_sliders(g: DFG, activity_pct: float, path_pct: float) -> DFG:
    """Activity slider (node retention) followed by path slider (edges)."""
    return filter_paths(reduce_dfg(g, activity_pct), path_pct)


def filter_adfg(ad: ADfg, activity_pct: float, path_pct: float) -> ADfg:
    """Slider filtering on an annotated union graph.

    Nodes and edges are ranked by the larger of their two range values;
    the path slider keeps each retained node's heaviest in- and
    out-edge, like filter_paths.
    """
    if not (0.0 < activity_pct <= 1.0 and 0.0 < path_pct <= 1.0):
        raise ValueError("slider fractions must be in (0, 1]")
    ranked_nodes = sorted(
        ad.activities, key=lambda n: (-max(ad.node_values.get(n, (0.0, 0.0))), n)
    )
    keep_n = math.ceil(activity_pct * len(ranked_nodes))
    kept_nodes = set(ranked_nodes[:keep_n]) | {START, END}
    edges = {
        pair: w for pair, w in ad.edges.items()
        if pair[0] in kept_nodes and pair[1] in kept_nodes
    }
    ranked_edges = sorted(edges.items(), key=lambda kv: (-max(kv[1]), kv[0]))
    keep_m = math.ceil(path_pct * len(ranked_edges))
    kept_edges = {pair for pair, _ in ranked_edges[:keep_m]}
    best_in: dict[str, Pair] = {}
    best_out: dict[str, Pair] = {}
    for pair, _ in ranked_edges:
        a, b = pair
        best_out.setdefault(a, pair)
        best_in.setdefault(b, pair)
    for node in kept_nodes:
        if node in best_in:
            kept_edges.add(best_in[node])
        if node in best_out:
            kept_edges.add(best_out[node])
    final_edges = {p: edges[p] for p in kept_edges}
    activities = kept_nodes - {START, END}
    node_values = {
        n: ad.node_values.get(n, (0.0, 0.0)) for n in kept_nodes
    }
    return ADfg(activities=frozenset(activities), edges=final_edges, node_values=node_values)


def adfg(g_left: DFG, g_right: DFG) -> ADfg:
    """Annotated union of two DFGs: every edge and node carries both weights."""
    activities = g_left.activities | g_right.activities
    pairs = set(g_left.edges) | set(g_right.edges)
    edges = {p: (g_left.weight(*p), g_right.weight(*p)) for p in pairs}
    nodes = activities | {START, END}
    node_values = {
        n: (g_left.node_freq.get(n, 0.0), g_right.node_freq.get(n, 0.0)) for n in nodes
    }
    return ADfg(activities=frozenset(activities), edges=edges, node_values=node_values)


def edge_balance(w_left: float, w_right: float) -> float:
    """Relative dominance of the right range, in [-1, 1] (0 when both 0)."""
    total = w_left + w_right
    if total == 0:
        return 0.0
    return (w_right - w_left) / total


def diverging_color(value: float) -> str:
    """Map [-1, 1] onto a red-black-green hex colour scale."""
    v = max(-1.0, min(1.0, value))
    if v < 0:
        return f"#{round(255 * -v):02x}0000"
    return f"#00{round(255 * v):02x}00"


def _fmt_weight(w: float) -> str:
    if float(w).is_integer():
        return str(int(w))
    return f"{w:.1f}"


def _node_lines(nodes: Iterable[str]) -> list[str]:
    lines = []
    for n in sorted(nodes):
        label = GLYPHS.get(n, n)
        shape = ' shape="circle"' if n in GLYPHS else ""
        lines.append(f'  "{n}" [label="{label}"{shape}];')
    return lines


def export_dot(g: DFG | ADfg, activity_pct: float = 1.0, path_pct: float = 1.0) -> str:
    """Render as a GraphViz digraph, optionally slider-filtered first.

    Annotated graphs label edges "left | right" and colour them on the
    red-black-green scale; the hex values are computed here so every
    frontend shows identical colours.
    """
    if activity_pct != 1.0 or path_pct != 1.0:
        if isinstance(g, ADfg):
            g = filter_adfg(g, activity_pct, path_pct)
        else:
            g = apply_sliders(g, activity_pct, path_pct)
    lines = ["digraph dfg {", "  rankdir=LR;"]
    if isinstance(g, ADfg):
        lines.extend(_node_lines(g.activities | {START, END}))
        for (a, b), (wl, wr) in sorted(g.edges.items()):
            color = diverging_color(edge_balance(wl, wr))
            label = f"{_fmt_weight(wl)} | {_fmt_weight(wr)}"
            lines.append(f'  "{a}" -> "{b}" [label="{label}" color="{color}"];')
    else:
        lines.extend(_node_lines(g.activities | {START, END}))
        for (a, b), w in sorted(g.edges.items()):
            lines.append(f'  "{a}" -> "{b}" [label="{_fmt_weight(w)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_dict(g: DFG | ADfg) -> dict:
    """JSON-ready representation (see export_json for the file format)."""
    if isinstance(g, ADfg):
        return {
            "activities": sorted(g.activities),
            "start": START,
            "end": END,
            "edges": [
                {
                    "from": a,
                    "to": b,
                    "w_left": wl,
                    "w_right": wr,
                    "balance": edge_balance(wl, wr),
                    "color": diverging_color(edge_balance(wl, wr)),
                }
                for (a, b), (wl, wr) in sorted(g.edges.items())
            ],
            "node_values": {
                n: {"left": vl, "right": vr}
                for n, (vl, vr) in sorted(g.node_values.items())
            },
        }
    return {
        "activities": sorted(g.activities),
        "start": START,
        "end": END,
        "edges": [
            {"from": a, "to": b, "weight": w} for (a, b), w in sorted(g.edges.items())
        ],
        "node_freq": dict(sorted(g.node_freq.items())),
    }


def export_json(g: DFG | ADfg) -> str:
    return json.dumps(to_dict(g), indent=2, ensure_ascii=False) + "\n"


def import_json(text: str) -> DFG | ADfg:
    """Inverse of export_json."""
    data = json.loads(text)
    edges = data.get("edges", [])
    annotated = any("w_left" in e for e in edges)
    if annotated:
        edge_map = {
            (e["from"], e["to"]): (float(e["w_left"]), float(e["w_right"]))
            for e in edges
        }
        node_values = {
            n: (float(v["left"]), float(v["right"]))
            for n, v in data.get("node_values", {}).items()
        }
        return ADfg(
            activities=frozenset(data["activities"]),
            edges=edge_map,
            node_values=node_values,
        )
    edge_map = {(e["from"], e["to"]): float(e["weight"]) for e in edges}
    return make_dfg(edge_map, data.get("activities", []))

/**
 * Layered left-to-right process-map layout and render instructions.
 *
 * The layout is longest-path layering from the artificial start node,
 * which therefore sits leftmost; the end node is pinned to the last
 * layer. Rendering is split into pure "instruction" builders (testable
 * without a DOM) and a small SVG applier.
 */

import type { AdfgPayload, DfgPayload } from "./api.js";
import { annotationColor, nodeFill } from "./color.js";

export interface NodePosition {
  name: string;
  layer: number;
  row: number;
  x: number;
  y: number;
}

export interface NodeInstruction {
  name: string;
  label: string;
  sublabel: string;
  fill: string;
  x: number;
  y: number;
}

export interface EdgeInstruction {
  from: string;
  to: string;
  label: string;
  color: string;
  width: number;
}

export interface GraphInstructions {
  nodes: NodeInstruction[];
  edges: EdgeInstruction[];
  width: number;
  height: number;
}

const LAYER_GAP = 170;
const ROW_GAP = 84;
const MARGIN = 60;

interface EdgeLike {
  from: string;
  to: string;
}

export function layerNodes(
  names: string[],
  edges: EdgeLike[],
  startNode: string,
  endNode: string,
): Map<string, number> {
  const layers = new Map<string, number>();
  const outgoing = new Map<string, string[]>();
  for (const name of names) outgoing.set(name, []);
  for (const edge of edges) {
    if (edge.from === edge.to) continue;
    outgoing.get(edge.from)?.push(edge.to);
  }
  layers.set(startNode, 0);
  // longest-path layering, bounded by the node count to survive cycles
  const limit = names.length + 1;
  let changed = true;
  let guard = 0;
  while (changed && guard < limit) {
    changed = false;
    guard += 1;
    for (const edge of edges) {
      if (edge.from === edge.to) continue;
      const fromLayer = layers.get(edge.from);
      if (fromLayer === undefined) continue;
      const proposal = Math.min(fromLayer + 1, limit);
      const current = layers.get(edge.to);
      if (edge.to !== startNode && (current === undefined || proposal > current)) {
        layers.set(edge.to, proposal);
        changed = true;
      }
    }
  }
  let deepest = 0;
  for (const [name, layer] of layers) {
    if (name !== endNode) deepest = Math.max(deepest, layer);
  }
  for (const name of names) {
    if (!layers.has(name)) layers.set(name, deepest + 1);
  }
  layers.set(endNode, Math.max(deepest + 1, layers.get(endNode) ?? 0));
  return layers;
}

export function layoutPositions(
  names: string[],
  edges: EdgeLike[],
  startNode: string,
  endNode: string,
): NodePosition[] {
  const layers = layerNodes(names, edges, startNode, endNode);
  const byLayer = new Map<number, string[]>();
  for (const name of [...names].sort()) {
    const layer = layers.get(name) ?? 0;
    const bucket = byLayer.get(layer) ?? [];
    bucket.push(name);
    byLayer.set(layer, bucket);
  }
  const positions: NodePosition[] = [];
  for (const [layer, bucket] of byLayer) {
    bucket.forEach((name, row) => {
      positions.push({
        name,
        layer,
        row,
        x: MARGIN + layer * LAYER_GAP,
        y: MARGIN + row * ROW_GAP,
      });
    });
  }
  return positions;
}

function formatWeight(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(1);
}

export function dfgInstructions(graph: DfgPayload): GraphInstructions {
  const names = [graph.start, ...graph.activities, graph.end];
  const positions = layoutPositions(names, graph.edges, graph.start, graph.end);
  const freq = graph.node_freq ?? {};
  const maxFreq = Math.max(1e-9, ...Object.values(freq));
  const maxWeight = Math.max(1e-9, ...graph.edges.map((e) => e.weight));
  const nodes = positions.map((pos) => ({
    name: pos.name,
    label: displayName(pos.name, graph),
    sublabel: pos.name in freq ? formatWeight(freq[pos.name]) : "",
    fill: nodeFill(freq[pos.name] ?? 0, maxFreq),
    x: pos.x,
    y: pos.y,
  }));
  const edges = graph.edges.map((edge) => ({
    from: edge.from,
    to: edge.to,
    label: formatWeight(edge.weight),
    color: "#444444",
    width: 1 + 3 * (edge.weight / maxWeight),
  }));
  return { nodes, edges, ...frame(positions) };
}

/**
 * Annotated union graph: labels show "left | right", edge colour comes
 * from the payload when the server provided it and is otherwise
 * derived with the shared red-black-green rule; node saturation scales
 * with the larger of the two range values.
 */
export function adfgInstructions(graph: AdfgPayload): GraphInstructions {
  const names = [graph.start, ...graph.activities, graph.end];
  const positions = layoutPositions(names, graph.edges, graph.start, graph.end);
  const values = graph.node_values;
  const maxValue = Math.max(
    1e-9,
    ...Object.values(values).map((v) => Math.max(v.left, v.right)),
  );
  const maxWeight = Math.max(
    1e-9,
    ...graph.edges.map((e) => Math.max(e.w_left, e.w_right)),
  );
  const nodes = positions.map((pos) => {
    const value = values[pos.name] ?? { left: 0, right: 0 };
    return {
      name: pos.name,
      label: displayName(pos.name, graph),
      sublabel: `${formatWeight(value.left)} | ${formatWeight(value.right)}`,
      fill: nodeFill(Math.max(value.left, value.right), maxValue),
      x: pos.x,
      y: pos.y,
    };
  });
  const edges = graph.edges.map((edge) => ({
    from: edge.from,
    to: edge.to,
    label: `${formatWeight(edge.w_left)} | ${formatWeight(edge.w_right)}`,
    color: edge.color ?? annotationColor(edge.w_left, edge.w_right),
    width: 1 + 3 * (Math.max(edge.w_left, edge.w_right) / maxWeight),
  }));
  return { nodes, edges, ...frame(positions) };
}

function displayName(name: string, graph: { start: string; end: string }): string {
  if (name === graph.start) return "▶";
  if (name === graph.end) return "■";
  return name;
}

function frame(positions: NodePosition[]): { width: number; height: number } {
  const width = Math.max(...positions.map((p) => p.x), MARGIN) + MARGIN + 40;
  const height = Math.max(...positions.map((p) => p.y), MARGIN) + MARGIN;
  return { width, height };
}

const SVG_NS = "http://www.w3.org/2000/svg";

/** Paint instructions into an SVG element (cleared first). */
export function renderInstructions(svg: SVGSVGElement, plan: GraphInstructions): void {
  while (svg.firstChild) svg.removeChild(svg.firstChild);
  svg.setAttribute("viewBox", `0 0 ${plan.width} ${plan.height}`);
  const byName = new Map(plan.nodes.map((n) => [n.name, n]));
  for (const edge of plan.edges) {
    const from = byName.get(edge.from);
    const to = byName.get(edge.to);
    if (!from || !to) continue;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(from.x));
    line.setAttribute("y1", String(from.y));
    line.setAttribute("x2", String(to.x));
    line.setAttribute("y2", String(to.y));
    line.setAttribute("stroke", edge.color);
    line.setAttribute("stroke-width", edge.width.toFixed(2));
    line.setAttribute("marker-end", "url(#arrow)");
    svg.appendChild(line);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String((from.x + to.x) / 2));
    label.setAttribute("y", String((from.y + to.y) / 2 - 6));
    label.setAttribute("class", "edge-label");
    label.setAttribute("fill", edge.color);
    label.textContent = edge.label;
    svg.appendChild(label);
  }
  for (const node of plan.nodes) {
    const group = document.createElementNS(SVG_NS, "g");
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(node.x));
    circle.setAttribute("cy", String(node.y));
    circle.setAttribute("r", "26");
    circle.setAttribute("fill", node.fill);
    circle.setAttribute("stroke", "#222");
    group.appendChild(circle);
    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("x", String(node.x));
    text.setAttribute("y", String(node.y - 2));
    text.setAttribute("class", "node-label");
    text.textContent = node.label;
    group.appendChild(text);
    if (node.sublabel) {
      const sub = document.createElementNS(SVG_NS, "text");
      sub.setAttribute("x", String(node.x));
      sub.setAttribute("y", String(node.y + 14));
      sub.setAttribute("class", "node-sublabel");
      sub.textContent = node.sublabel;
      group.appendChild(sub);
    }
    svg.appendChild(group);
  }
}

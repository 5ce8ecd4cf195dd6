/**
 * Timeline area chart with brushable regions.
 *
 * Actual and forecast intervals get distinct fills; up to two brushed
 * regions are shown in red (earlier) and green (later), matching the
 * edge colour scheme of the annotated graph view.
 */

import type { TimelineInterval } from "./api.js";
import type { Region } from "./state.js";

export interface ChartGeometry {
  width: number;
  height: number;
  padding: number;
}

export const DEFAULT_GEOMETRY: ChartGeometry = { width: 900, height: 140, padding: 24 };

export function intervalToX(index: number, count: number, geo: ChartGeometry): number {
  const inner = geo.width - 2 * geo.padding;
  if (count <= 1) return geo.padding + inner / 2;
  return geo.padding + ((index - 1) / (count - 1)) * inner;
}

export function xToInterval(x: number, count: number, geo: ChartGeometry): number {
  const inner = geo.width - 2 * geo.padding;
  const ratio = (x - geo.padding) / inner;
  const index = Math.round(ratio * (count - 1)) + 1;
  return Math.max(1, Math.min(count, index));
}

export function pixelsToRegion(
  x0: number,
  x1: number,
  count: number,
  geo: ChartGeometry,
): Region {
  const a = xToInterval(Math.min(x0, x1), count, geo);
  const b = xToInterval(Math.max(x0, x1), count, geo);
  return { from: a, to: b };
}

/** SVG path for the filled area of a contiguous run of intervals. */
export function areaPath(
  intervals: TimelineInterval[],
  allCount: number,
  maxTotal: number,
  geo: ChartGeometry,
): string {
  if (intervals.length === 0) return "";
  const floor = geo.height - geo.padding;
  const scaleY = (total: number): number => {
    const inner = geo.height - 2 * geo.padding;
    const ratio = maxTotal > 0 ? total / maxTotal : 0;
    return floor - ratio * inner;
  };
  const points = intervals.map(
    (it) => [intervalToX(it.index, allCount, geo), scaleY(it.total)] as const,
  );
  const head = points[0];
  const tail = points[points.length - 1];
  const segments = points.map(([x, y]) => `L${x.toFixed(1)},${y.toFixed(1)}`);
  return (
    `M${head[0].toFixed(1)},${floor.toFixed(1)} ` +
    segments.join(" ") +
    ` L${tail[0].toFixed(1)},${floor.toFixed(1)} Z`
  );
}

export interface TimelineRender {
  /** one path per contiguous run of same-kind intervals */
  areas: { kind: "actual" | "forecast"; path: string }[];
  regionRects: { region: Region; color: string; x0: number; x1: number }[];
}

export function buildTimelineRender(
  intervals: TimelineInterval[],
  regions: Region[],
  geo: ChartGeometry,
): TimelineRender {
  const count = intervals.length;
  const maxTotal = Math.max(0, ...intervals.map((it) => it.total));
  const runs: TimelineInterval[][] = [];
  for (const interval of intervals) {
    const current = runs[runs.length - 1];
    if (current && current[current.length - 1].kind === interval.kind) {
      current.push(interval);
    } else {
      // duplicate the junction point so runs visually connect
      if (current) runs.push([current[current.length - 1], interval]);
      else runs.push([interval]);
    }
  }
  const areas = runs.map((run) => ({
    kind: run[run.length - 1].kind,
    path: areaPath(run, count, maxTotal, geo),
  }));
  const colors = ["#d33", "#2a2"];
  const regionRects = regions.slice(0, 2).map((region, i) => ({
    region,
    color: colors[i],
    x0: intervalToX(region.from, count, geo),
    x1: intervalToX(region.to, count, geo),
  }));
  return { areas, regionRects };
}

export interface TimelineCallbacks {
  onBrush(region: Region): void;
  onClear(): void;
}

/** Attach the chart to an SVG element and wire pointer-driven brushing. */
export function renderTimeline(
  svg: SVGSVGElement,
  intervals: TimelineInterval[],
  regions: Region[],
  callbacks: TimelineCallbacks,
  geo: ChartGeometry = DEFAULT_GEOMETRY,
): void {
  const SVG_NS = "http://www.w3.org/2000/svg";
  while (svg.firstChild) svg.removeChild(svg.firstChild);
  svg.setAttribute("viewBox", `0 0 ${geo.width} ${geo.height}`);
  const render = buildTimelineRender(intervals, regions, geo);
  for (const area of render.areas) {
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", area.path);
    path.setAttribute("class", area.kind === "forecast" ? "area-forecast" : "area-actual");
    svg.appendChild(path);
  }
  for (const rect of render.regionRects) {
    const el = document.createElementNS(SVG_NS, "rect");
    el.setAttribute("x", String(Math.min(rect.x0, rect.x1)));
    el.setAttribute("y", String(geo.padding));
    el.setAttribute("width", String(Math.max(6, Math.abs(rect.x1 - rect.x0))));
    el.setAttribute("height", String(geo.height - 2 * geo.padding));
    el.setAttribute("fill", rect.color);
    el.setAttribute("opacity", "0.25");
    svg.appendChild(el);
  }

  let dragStart: number | null = null;
  const toLocalX = (event: PointerEvent): number => {
    const rect = svg.getBoundingClientRect();
    return ((event.clientX - rect.left) / rect.width) * geo.width;
  };
  svg.onpointerdown = (event) => {
    dragStart = toLocalX(event);
    svg.setPointerCapture(event.pointerId);
  };
  svg.onpointerup = (event) => {
    if (dragStart === null) return;
    const end = toLocalX(event);
    const moved = Math.abs(end - dragStart) > 4;
    if (moved) {
      callbacks.onBrush(pixelsToRegion(dragStart, end, intervals.length, geo));
    } else {
      callbacks.onClear();
    }
    dragStart = null;
  };
}

/**
 * View state and its URL encoding.
 *
 * The full view state lives in the query string so any view is
 * shareable: reloading a URL restores the aggregation, sliders,
 * forecast overlay, and brushed regions exactly.
 */

export interface Region {
  /** inclusive 1-based interval range */
  from: number;
  to: number;
}

export type Aggregation = "equitemporal" | "equisized";

export interface ViewState {
  aggregation: Aggregation;
  /** fraction of activities retained, in (0, 1] */
  activitySlider: number;
  /** fraction of paths retained, in (0, 1] */
  pathSlider: number;
  forecastOverlay: boolean;
  /** zero, one, or two brushed regions, in brush order */
  regions: Region[];
}

export const DEFAULT_STATE: ViewState = {
  aggregation: "equisized",
  activitySlider: 1,
  pathSlider: 1,
  forecastOverlay: false,
  regions: [],
};

function formatRegion(region: Region): string {
  return `${region.from}-${region.to}`;
}

function parseRegion(text: string): Region | null {
  const match = /^(\d+)-(\d+)$/.exec(text);
  if (!match) return null;
  const from = Number(match[1]);
  const to = Number(match[2]);
  if (!Number.isInteger(from) || !Number.isInteger(to) || from < 1 || to < from) {
    return null;
  }
  return { from, to };
}

export function encodeViewState(state: ViewState): string {
  const params = new URLSearchParams();
  params.set("agg", state.aggregation);
  params.set("act", String(state.activitySlider));
  params.set("path", String(state.pathSlider));
  params.set("fc", state.forecastOverlay ? "1" : "0");
  state.regions.forEach((region, i) => {
    params.set(`r${i}`, formatRegion(region));
  });
  return params.toString();
}

function parseSlider(raw: string | null, fallback: number): number {
  if (raw === null) return fallback;
  const value = Number(raw);
  return Number.isFinite(value) && value > 0 && value <= 1 ? value : fallback;
}

export function decodeViewState(query: string): ViewState {
  const params = new URLSearchParams(query);
  const agg = params.get("agg");
  const regions: Region[] = [];
  for (const key of ["r0", "r1"]) {
    const raw = params.get(key);
    if (raw === null) break;
    const region = parseRegion(raw);
    if (region === null) break;
    regions.push(region);
  }
  return {
    aggregation: agg === "equitemporal" ? "equitemporal" : "equisized",
    activitySlider: parseSlider(params.get("act"), 1),
    pathSlider: parseSlider(params.get("path"), 1),
    forecastOverlay: params.get("fc") === "1",
    regions,
  };
}

export function statesEqual(a: ViewState, b: ViewState): boolean {
  return encodeViewState(a) === encodeViewState(b);
}

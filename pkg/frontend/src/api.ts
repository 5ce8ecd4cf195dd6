/**
 * Thin client for the forecasting server's JSON API.
 *
 * Every number shown in the UI comes from these responses; nothing is
 * recomputed client-side. A newer request for the same view supersedes
 * the in-flight one, which is aborted.
 */

import type { Aggregation, Region } from "./state.js";

export interface TimelineInterval {
  index: number;
  kind: "actual" | "forecast";
  total: number;
  start: string | null;
  end: string | null;
}

export interface TimelinePayload {
  aggregation: Aggregation;
  s: number;
  horizon: number;
  intervals: TimelineInterval[];
}

export interface DfgEdge {
  from: string;
  to: string;
  weight: number;
}

export interface DfgPayload {
  activities: string[];
  start: string;
  end: string;
  edges: DfgEdge[];
  node_freq?: Record<string, number>;
}

export interface AdfgEdge {
  from: string;
  to: string;
  w_left: number;
  w_right: number;
  balance?: number;
  color?: string;
}

export interface AdfgPayload {
  activities: string[];
  start: string;
  end: string;
  edges: AdfgEdge[];
  node_values: Record<string, { left: number; right: number }>;
}

export type GraphPayload =
  | { kind: "dfg"; graph: DfgPayload }
  | { kind: "adfg"; graph: AdfgPayload };

export interface SliderParams {
  activityPct: number;
  pathPct: number;
}

export interface ForecastRequest {
  family: string;
  ts: number;
  h: number;
  order?: [number, number, number];
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export function dfgQuery(region: Region, sliders: SliderParams, agg: Aggregation): string {
  const params = new URLSearchParams({
    from: String(region.from),
    to: String(region.to),
    activity_pct: String(sliders.activityPct),
    path_pct: String(sliders.pathPct),
    agg,
  });
  return `/api/dfg?${params.toString()}`;
}

export function adfgQuery(
  first: Region,
  second: Region,
  sliders: SliderParams,
  agg: Aggregation,
): string {
  const params = new URLSearchParams({
    l_from: String(first.from),
    l_to: String(first.to),
    r_from: String(second.from),
    r_to: String(second.to),
    activity_pct: String(sliders.activityPct),
    path_pct: String(sliders.pathPct),
    agg,
  });
  return `/api/adfg?${params.toString()}`;
}

export function timelineQuery(agg: Aggregation): string {
  return `/api/timeline?${new URLSearchParams({ agg }).toString()}`;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  private readonly fetchFn: FetchLike;
  private readonly controllers = new Map<string, AbortController>();

  constructor(fetchFn?: FetchLike) {
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
  }

  /** Abort any in-flight request in the same channel, then fetch JSON. */
  private async getJson<T>(channel: string, url: string): Promise<T> {
    this.controllers.get(channel)?.abort();
    const controller = new AbortController();
    this.controllers.set(channel, controller);
    const response = await this.fetchFn(url, { signal: controller.signal });
    if (!response.ok) {
      throw new ApiError(response.status, `${url} -> ${response.status}`);
    }
    return (await response.json()) as T;
  }

  getTimeline(agg: Aggregation): Promise<TimelinePayload> {
    return this.getJson("timeline", timelineQuery(agg));
  }

  getDfg(region: Region, sliders: SliderParams, agg: Aggregation): Promise<DfgPayload> {
    return this.getJson("graph", dfgQuery(region, sliders, agg));
  }

  getAdfg(
    first: Region,
    second: Region,
    sliders: SliderParams,
    agg: Aggregation,
  ): Promise<AdfgPayload> {
    return this.getJson("graph", adfgQuery(first, second, sliders, agg));
  }

  async postForecast(request: ForecastRequest, agg: Aggregation): Promise<unknown> {
    const response = await this.fetchFn("/api/forecast", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ ...request, agg }),
    });
    if (!response.ok) {
      throw new ApiError(response.status, `forecast -> ${response.status}`);
    }
    return response.json();
  }
}

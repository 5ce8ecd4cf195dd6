import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, adfgQuery, dfgQuery } from "../src/api.js";

function jsonResponse(body: unknown): Response {
  return new Response(JSON.stringify(body), { status: 200 });
}

describe("query building", () => {
  it("dfg query carries range, sliders, and aggregation", () => {
    const url = new URL(
      dfgQuery({ from: 3, to: 9 }, { activityPct: 0.5, pathPct: 0.25 }, "equitemporal"),
      "http://localhost",
    );
    expect(url.pathname).toBe("/api/dfg");
    expect(url.searchParams.get("from")).toBe("3");
    expect(url.searchParams.get("to")).toBe("9");
    expect(url.searchParams.get("activity_pct")).toBe("0.5");
    expect(url.searchParams.get("path_pct")).toBe("0.25");
    expect(url.searchParams.get("agg")).toBe("equitemporal");
  });

  it("adfg query keeps the two ranges distinct", () => {
    const url = new URL(
      adfgQuery(
        { from: 1, to: 2 },
        { from: 8, to: 9 },
        { activityPct: 1, pathPct: 1 },
        "equisized",
      ),
      "http://localhost",
    );
    expect(url.searchParams.get("l_from")).toBe("1");
    expect(url.searchParams.get("r_to")).toBe("9");
  });
});

describe("request lifecycle", () => {
  it("aborts the in-flight graph request when superseded", async () => {
    const signals: AbortSignal[] = [];
    const api = new ApiClient((url, init) => {
      signals.push(init!.signal!);
      return new Promise<Response>((resolve) => {
        // resolve slowly so the first request is still pending
        setTimeout(() => resolve(jsonResponse({ activities: [], start: "s", end: "e", edges: [] })), 5);
      });
    });
    const first = api.getDfg({ from: 1, to: 5 }, { activityPct: 1, pathPct: 1 }, "equisized");
    const second = api.getDfg({ from: 2, to: 6 }, { activityPct: 1, pathPct: 1 }, "equisized");
    await second;
    expect(signals).toHaveLength(2);
    expect(signals[0].aborted).toBe(true);
    expect(signals[1].aborted).toBe(false);
    await first.catch(() => undefined);
  });

  it("keeps timeline and graph channels independent", async () => {
    const signals: AbortSignal[] = [];
    const api = new ApiClient(async (url, init) => {
      signals.push(init!.signal!);
      return jsonResponse(
        url.includes("timeline")
          ? { aggregation: "equisized", s: 3, horizon: 0, intervals: [] }
          : { activities: [], start: "s", end: "e", edges: [] },
      );
    });
    await api.getTimeline("equisized");
    await api.getDfg({ from: 1, to: 3 }, { activityPct: 1, pathPct: 1 }, "equisized");
    expect(signals[0].aborted).toBe(false);
    expect(signals[1].aborted).toBe(false);
  });

  it("raises ApiError with the status on failure", async () => {
    const api = new ApiClient(async () => new Response("bad", { status: 400 }));
    await expect(
      api.getDfg({ from: 2, to: 1 }, { activityPct: 1, pathPct: 1 }, "equisized"),
    ).rejects.toMatchObject({ status: 400 });
    await expect(api.getTimeline("equisized")).rejects.toBeInstanceOf(ApiError);
  });
});

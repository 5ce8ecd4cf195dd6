import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { BrushController, regionsOverlap } from "../src/brush.js";

function jsonResponse(body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status: 200,
    headers: { "Content-Type": "application/json" },
  });
}

const EMPTY_ADFG = {
  activities: [],
  start: "__START__",
  end: "__END__",
  edges: [],
  node_values: {},
};

describe("brush-driven graph requests", () => {
  it("two brushed regions issue exactly one adfg request with ordered ranges", async () => {
    const calls: string[] = [];
    const api = new ApiClient(async (url) => {
      calls.push(url);
      return jsonResponse(EMPTY_ADFG);
    });
    const brush = new BrushController(100);
    brush.addRegion({ from: 10, to: 30 });
    brush.addRegion({ from: 60, to: 80 });

    const decision = brush.decide();
    expect(decision.kind).toBe("adfg");
    if (decision.kind !== "adfg") return;
    await api.getAdfg(
      decision.first,
      decision.second,
      { activityPct: 1, pathPct: 1 },
      "equisized",
    );

    expect(calls).toHaveLength(1);
    const url = new URL(calls[0], "http://localhost");
    expect(url.pathname).toBe("/api/adfg");
    // the earlier brushed region supplies the left (red) range
    expect(url.searchParams.get("l_from")).toBe("10");
    expect(url.searchParams.get("l_to")).toBe("30");
    expect(url.searchParams.get("r_from")).toBe("60");
    expect(url.searchParams.get("r_to")).toBe("80");
  });

  it("one region decides a dfg request for that range", () => {
    const brush = new BrushController(50);
    brush.addRegion({ from: 5, to: 12 });
    expect(brush.decide()).toEqual({ kind: "dfg", region: { from: 5, to: 12 } });
  });

  it("no regions decide a full-range view", () => {
    const brush = new BrushController(50);
    expect(brush.decide()).toEqual({ kind: "full" });
    brush.addRegion({ from: 5, to: 12 });
    brush.clear();
    expect(brush.decide()).toEqual({ kind: "full" });
  });

  it("rejects an overlapping second region", () => {
    const brush = new BrushController(50);
    brush.addRegion({ from: 10, to: 20 });
    expect(brush.addRegion({ from: 15, to: 25 })).toBe(false);
    expect(brush.getRegions()).toHaveLength(1);
  });

  it("a third brush starts a fresh selection", () => {
    const brush = new BrushController(50);
    brush.addRegion({ from: 1, to: 5 });
    brush.addRegion({ from: 10, to: 15 });
    brush.addRegion({ from: 30, to: 40 });
    expect(brush.getRegions()).toEqual([{ from: 30, to: 40 }]);
  });

  it("clamps regions to the available intervals", () => {
    const brush = new BrushController(20);
    brush.addRegion({ from: 15, to: 99 });
    expect(brush.getRegions()).toEqual([{ from: 15, to: 20 }]);
  });

  it("overlap helper matches interval arithmetic", () => {
    expect(regionsOverlap({ from: 1, to: 5 }, { from: 5, to: 9 })).toBe(true);
    expect(regionsOverlap({ from: 1, to: 4 }, { from: 5, to: 9 })).toBe(false);
  });
});

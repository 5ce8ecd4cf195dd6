/**
 * Brush coordination: zero, one, or two regions selected on the
 * timeline decide which graph endpoint is queried.
 *
 * One region zooms the DFG to it; two regions switch to the annotated
 * union graph, the earlier brushed region supplying the left (red)
 * numbers and the later one the right (green) numbers. Overlapping
 * second brushes are rejected so the two ranges stay disjoint.
 */

import type { Region } from "./state.js";

export type FetchDecision =
  | { kind: "dfg"; region: Region }
  | { kind: "adfg"; first: Region; second: Region }
  | { kind: "full" };

export function regionsOverlap(a: Region, b: Region): boolean {
  return a.from <= b.to && b.from <= a.to;
}

export function clampRegion(region: Region, maxInterval: number): Region {
  const from = Math.max(1, Math.min(region.from, maxInterval));
  const to = Math.max(from, Math.min(region.to, maxInterval));
  return { from, to };
}

export class BrushController {
  private regions: Region[] = [];

  constructor(private maxInterval: number) {}

  setMaxInterval(maxInterval: number): void {
    this.maxInterval = maxInterval;
    this.regions = this.regions.map((r) => clampRegion(r, maxInterval));
  }

  getRegions(): Region[] {
    return [...this.regions];
  }

  setRegions(regions: Region[]): void {
    this.regions = [];
    for (const region of regions.slice(0, 2)) {
      this.addRegion(region);
    }
  }

  /**
   * Register a brushed region. The third brush starts over with a
   * fresh single region; an overlapping second brush is ignored.
   * Returns true when the selection changed.
   */
  addRegion(region: Region): boolean {
    const clamped = clampRegion(region, this.maxInterval);
    if (this.regions.length >= 2) {
      this.regions = [clamped];
      return true;
    }
    if (this.regions.length === 1 && regionsOverlap(this.regions[0], clamped)) {
      return false;
    }
    this.regions.push(clamped);
    return true;
  }

  clear(): boolean {
    const changed = this.regions.length > 0;
    this.regions = [];
    return changed;
  }

  decide(): FetchDecision {
    if (this.regions.length === 2) {
      return { kind: "adfg", first: this.regions[0], second: this.regions[1] };
    }
    if (this.regions.length === 1) {
      return { kind: "dfg", region: this.regions[0] };
    }
    return { kind: "full" };
  }
}

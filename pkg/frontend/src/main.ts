/**
 * Application wiring: URL-backed view state, the brushable timeline,
 * the graph view, and the two simplification sliders.
 */

import { ApiClient } from "./api.js";
import type { TimelinePayload } from "./api.js";
import { BrushController } from "./brush.js";
import { SLIDER_DEBOUNCE_MS, debounce } from "./debounce.js";
import { adfgInstructions, dfgInstructions, renderInstructions } from "./graph.js";
import { DEFAULT_STATE, decodeViewState, encodeViewState } from "./state.js";
import type { ViewState } from "./state.js";
import { renderTimeline } from "./timeline.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export class App {
  private state: ViewState;
  private readonly brush: BrushController;
  private timeline: TimelinePayload | null = null;

  constructor(
    private readonly api: ApiClient,
    initial?: ViewState,
  ) {
    this.state = initial ?? { ...DEFAULT_STATE };
    this.brush = new BrushController(1);
    this.brush.setRegions(this.state.regions);
  }

  async start(): Promise<void> {
    this.bindControls();
    await this.reloadTimeline();
    await this.refreshGraph();
  }

  private bindControls(): void {
    const agg = el<HTMLSelectElement>("agg-select");
    agg.value = this.state.aggregation;
    agg.onchange = () => {
      this.state.aggregation = agg.value === "equitemporal" ? "equitemporal" : "equisized";
      this.brush.clear();
      this.state.regions = [];
      void this.reloadTimeline().then(() => this.refreshGraph());
    };
    const activity = el<HTMLInputElement>("activity-slider");
    const path = el<HTMLInputElement>("path-slider");
    activity.value = String(this.state.activitySlider);
    path.value = String(this.state.pathSlider);
    const push = debounce(() => void this.refreshGraph(), SLIDER_DEBOUNCE_MS);
    activity.oninput = () => {
      this.state.activitySlider = Number(activity.value) || 1;
      el<HTMLElement>("activity-value").textContent = activity.value;
      push();
    };
    path.oninput = () => {
      this.state.pathSlider = Number(path.value) || 1;
      el<HTMLElement>("path-value").textContent = path.value;
      push();
    };
    const forecastButton = el<HTMLButtonElement>("forecast-button");
    forecastButton.onclick = () => void this.loadForecast();
  }

  private syncUrl(): void {
    const query = encodeViewState(this.state);
    history.replaceState(null, "", `${location.pathname}?${query}`);
  }

  private async reloadTimeline(): Promise<void> {
    try {
      this.timeline = await this.api.getTimeline(this.state.aggregation);
    } catch (error) {
      this.showMessage(`timeline unavailable: ${String(error)}`);
      return;
    }
    const total = this.timeline.s + this.timeline.horizon;
    this.brush.setMaxInterval(total);
    this.drawTimeline();
  }

  private drawTimeline(): void {
    if (!this.timeline) return;
    const svg = el<HTMLElement>("timeline") as unknown as SVGSVGElement;
    renderTimeline(svg, this.timeline.intervals, this.brush.getRegions(), {
      onBrush: (region) => {
        if (this.brush.addRegion(region)) {
          this.state.regions = this.brush.getRegions();
          this.drawTimeline();
          void this.refreshGraph();
        }
      },
      onClear: () => {
        if (this.brush.clear()) {
          this.state.regions = [];
          this.drawTimeline();
          void this.refreshGraph();
        }
      },
    });
    const caption = el<HTMLElement>("timeline-caption");
    const horizon = this.timeline.horizon;
    caption.textContent =
      horizon > 0
        ? `${this.timeline.s} observed intervals, ${horizon} forecasted`
        : `${this.timeline.s} observed intervals`;
  }

  private async refreshGraph(): Promise<void> {
    if (!this.timeline) return;
    this.syncUrl();
    const sliders = {
      activityPct: this.state.activitySlider,
      pathPct: this.state.pathSlider,
    };
    const agg = this.state.aggregation;
    const total = this.timeline.s + this.timeline.horizon;
    const decision = this.brush.decide();
    const svg = el<HTMLElement>("graph") as unknown as SVGSVGElement;
    try {
      if (decision.kind === "adfg") {
        const graph = await this.api.getAdfg(decision.first, decision.second, sliders, agg);
        renderInstructions(svg, adfgInstructions(graph));
        this.showMessage(
          this.describeMix(decision.first, decision.second)
        );
      } else {
        const region = decision.kind === "dfg" ? decision.region : { from: 1, to: total };
        const graph = await this.api.getDfg(region, sliders, agg);
        renderInstructions(svg, dfgInstructions(graph));
        this.showMessage("");
      }
    } catch (error) {
      if ((error as Error).name === "AbortError") return;
      this.showMessage(`graph unavailable: ${String(error)}`);
    }
  }

  /** Note when a brushed range straddles the actual/forecast boundary. */
  private describeMix(first: { from: number; to: number }, second: { from: number; to: number }): string {
    if (!this.timeline || this.timeline.horizon === 0) return "";
    const s = this.timeline.s;
    const straddles = (r: { from: number; to: number }) => r.from <= s && r.to > s;
    const mixed = [first, second].some(straddles);
    return mixed ? "note: a brushed range mixes observed and forecasted intervals" : "";
  }

  private async loadForecast(): Promise<void> {
    if (!this.timeline) return;
    const family = el<HTMLSelectElement>("family-select").value;
    const ts = this.timeline.s;
    const h = Number(el<HTMLInputElement>("horizon-input").value) || 10;
    try {
      await this.api.postForecast({ family, ts, h }, this.state.aggregation);
      this.state.forecastOverlay = true;
      await this.reloadTimeline();
      await this.refreshGraph();
    } catch (error) {
      this.showMessage(`forecast failed: ${String(error)}`);
    }
  }

  private showMessage(text: string): void {
    el<HTMLElement>("message").textContent = text;
  }
}

export function boot(): void {
  const state = decodeViewState(location.search);
  const app = new App(new ApiClient(), state);
  void app.start();
}

if (typeof document !== "undefined" && document.getElementById("timeline")) {
  boot();
}

import { ApiClient, ApiError } from "./api.js";
import { renderScatter } from "./scatter.js";
import { QueryState, toAdviseBody } from "./state.js";
import type { AdvisePayload, Recommendation } from "./types.js";

// What-if loop: each submission renders the server's ranked list
// verbatim into the "current" panel while the previous result stays
// beside it for one-step comparison. Errors land inline and never
// clear the panels or the query state.

export interface AdviseRendering {
  payload: AdvisePayload;
  digest: string;
  state: QueryState;
}

function breakdownBar(entry: Recommendation): HTMLElement {
  const bar = document.createElement("div");
  bar.className = "breakdown-bar";
  if (!entry.breakdown) return bar;
  const parts: Array<[string, number]> = [
    ["a", entry.breakdown.a],
    ["p", entry.breakdown.p],
    ["g", entry.breakdown.g],
    ["s", entry.breakdown.s],
    ["u", entry.breakdown.u],
  ];
  for (const [label, value] of parts) {
    const segment = document.createElement("span");
    segment.className = `seg seg-${label}`;
    segment.style.width = `${Math.round(value * 40)}px`;
    segment.title = `${label}=${value.toFixed(3)}`;
    bar.appendChild(segment);
  }
  return bar;
}

export function renderRecommendations(root: HTMLElement, rendering: AdviseRendering | null): void {
  root.innerHTML = "";
  if (!rendering) {
    const empty = document.createElement("div");
    empty.className = "empty";
    empty.textContent = "no query yet";
    root.appendChild(empty);
    return;
  }
  const { payload } = rendering;
  const meta = document.createElement("div");
  meta.className = "caption";
  meta.textContent = `${payload.entries.length} recommended, ${payload.excluded} filtered out`;
  root.appendChild(meta);
  if (payload.entries.length === 0) {
    const notice = document.createElement("div");
    notice.className = "empty";
    notice.textContent = payload.binding_constraint
      ? `no model satisfies the constraints (binding: ${payload.binding_constraint})`
      : "no model satisfies the constraints";
    root.appendChild(notice);
    return;
  }
  const list = document.createElement("ol");
  list.className = "recommendations";
  for (const entry of payload.entries) {
    const item = document.createElement("li");
    item.dataset.model = entry.model;
    const name = document.createElement("span");
    name.className = "model";
    name.textContent = entry.model;
    const score = document.createElement("span");
    score.className = "score";
    score.textContent = entry.score.toFixed(3);
    const bins = document.createElement("span");
    bins.className = "bins";
    bins.textContent = `${entry.bins.storage} / ${entry.bins.compute} / ${entry.bins.speed}`;
    item.append(name, score, bins, breakdownBar(entry));
    list.appendChild(item);
  }
  root.appendChild(list);
}

export class AdvisorPanel {
  previous: AdviseRendering | null = null;
  current: AdviseRendering | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly currentRoot: HTMLElement,
    private readonly previousRoot: HTMLElement,
    private readonly scatterRoot: HTMLElement,
    private readonly errorRoot: HTMLElement,
  ) {}

  /** Submit the state; resolves false when superseded by a newer call. */
  async submit(state: QueryState): Promise<boolean> {
    this.errorRoot.textContent = "";
    let envelope;
    try {
      envelope = await this.api.advise(toAdviseBody(state));
    } catch (error) {
      const message = error instanceof ApiError ? error.message : String(error);
      this.errorRoot.textContent = message; // inline; panels keep their state
      return false;
    }
    if (envelope === null) return false; // a newer submission won
    this.previous = this.current;
    this.current = { payload: envelope.payload, digest: envelope.registry_digest, state };
    this.render();
    return true;
  }

  render(): void {
    renderRecommendations(this.currentRoot, this.current);
    renderRecommendations(this.previousRoot, this.previous);
    renderScatter(this.scatterRoot, this.current?.payload.entries ?? []);
  }
}

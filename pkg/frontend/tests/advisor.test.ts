import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { AdvisorPanel } from "../src/advisor.js";
import { DEFAULT_STATE, QueryState } from "../src/state.js";
import fixtures from "./fixtures/api.json";

function canonical(value: unknown): string {
  if (Array.isArray(value)) return `[${value.map(canonical).join(",")}]`;
  if (value !== null && typeof value === "object") {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => a.localeCompare(b))
      .map(([k, v]) => `${JSON.stringify(k)}:${canonical(v)}`);
    return `{${entries.join(",")}}`;
  }
  return JSON.stringify(value);
}

// fetch stub that answers /advise from the captured server payloads by
// matching the request body against each fixture's recorded request
function fixtureFetch(delayByKey: Partial<Record<string, number>> = {}) {
  return vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    if (!url.includes("/api/v1/advise")) throw new Error(`unexpected url ${url}`);
    const body = JSON.parse(String(init?.body));
    const match = Object.entries(fixtures).find(
      ([, value]) =>
        typeof value === "object" &&
        value !== null &&
        "request" in value &&
        canonical((value as { request: unknown }).request) === canonical(body),
    );
    if (!match) throw new Error(`no captured payload for ${JSON.stringify(body)}`);
    const [key, value] = match;
    const delay = delayByKey[key] ?? 0;
    await new Promise<void>((resolve, reject) => {
      const timer = setTimeout(resolve, delay);
      init?.signal?.addEventListener("abort", () => {
        clearTimeout(timer);
        reject(new DOMException("aborted", "AbortError"));
      });
    });
    return new Response(JSON.stringify((value as { response: unknown }).response), {
      status: 200,
      headers: { "Content-Type": "application/json" },
    });
  });
}

function openQuery(labelKind: "iou" | "uscore", extra: Partial<QueryState> = {}): QueryState {
  return {
    ...DEFAULT_STATE,
    smallScale: true,
    irregularShape: true,
    blurBoundary: true,
    k: 100,
    labelKind,
    ...extra,
  };
}

function renderedModels(rootId: string): string[] {
  const root = document.getElementById(rootId) as HTMLElement;
  return Array.from(root.querySelectorAll("li")).map((li) => li.dataset.model ?? "");
}

describe("advisor what-if panel", () => {
  let panel: AdvisorPanel;

  beforeEach(() => {
    document.body.innerHTML = `
      <div id="current"></div><div id="previous"></div>
      <div id="scatter"></div><div id="error"></div>`;
    panel = new AdvisorPanel(
      new ApiClient(""),
      document.getElementById("current") as HTMLElement,
      document.getElementById("previous") as HTMLElement,
      document.getElementById("scatter") as HTMLElement,
      document.getElementById("error") as HTMLElement,
    );
  });

  afterEach(() => {
    vi.unstubAllGlobals();
  });

  it("renders the server list verbatim and keeps the previous result beside it", async () => {
    vi.stubGlobal("fetch", fixtureFetch());
    await panel.submit(openQuery("iou"));
    const iouHead = renderedModels("current")[0];
    expect(iouHead).toBe("RWKV-UNet");

    await panel.submit(openQuery("uscore"));
    // toggling the relevance kind swaps the recommendation head and the
    // old list moves to the comparison panel
    expect(renderedModels("current")[0]).not.toBe(iouHead);
    expect(renderedModels("previous")[0]).toBe(iouHead);
    const served = (fixtures.advise_uscore_open.response.payload.entries as Array<{ model: string }>).map(
      (e) => e.model,
    );
    expect(renderedModels("current")).toEqual(served); // no client-side re-ranking
  });

  it("tightening any constraint never increases the result count", async () => {
    vi.stubGlobal("fetch", fixtureFetch());
    const ladders: Array<Array<Partial<QueryState>>> = [
      [{}, { storage: "Large" }, { storage: "Medium" }, { storage: "Small" }, { storage: "Tiny" }],
      [{}, { compute: "High" }, { compute: "Medium" }, { compute: "Low" }],
      [{}, { speed: "Slow" }, { speed: "Medium" }, { speed: "Fast" }],
    ];
    for (const ladder of ladders) {
      let lastCount = Number.POSITIVE_INFINITY;
      for (const extra of ladder) {
        await panel.submit(openQuery("uscore", extra));
        const count = renderedModels("current").length;
        expect(count).toBeLessThanOrEqual(lastCount);
        lastCount = count;
      }
    }
  });

  it("surfaces errors inline without clearing the panels", async () => {
    vi.stubGlobal("fetch", fixtureFetch());
    await panel.submit(openQuery("iou"));
    const before = renderedModels("current");

    vi.stubGlobal(
      "fetch",
      vi.fn(async () => new Response(JSON.stringify({ detail: "no ranker loaded" }), { status: 503 })),
    );
    const ok = await panel.submit(openQuery("uscore"));
    expect(ok).toBe(false);
    expect(document.getElementById("error")?.textContent).toContain("no ranker loaded");
    expect(renderedModels("current")).toEqual(before); // state retained
  });

  it("at most one in-flight request: the latest submission wins", async () => {
    vi.stubGlobal("fetch", fixtureFetch({ advise_iou_open: 50 }));
    const slow = panel.submit(openQuery("iou"));
    const fast = panel.submit(openQuery("uscore"));
    const [slowResult, fastResult] = await Promise.all([slow, fast]);
    expect(slowResult).toBe(false); // superseded
    expect(fastResult).toBe(true);
    const served = (fixtures.advise_uscore_open.response.payload.entries as Array<{ model: string }>).map(
      (e) => e.model,
    );
    expect(renderedModels("current")).toEqual(served);
    expect(renderedModels("previous")).toEqual([]); // aborted call never landed
  });

  it("draws one scatter point per recommendation with a breakdown", async () => {
    vi.stubGlobal("fetch", fixtureFetch());
    await panel.submit(openQuery("uscore"));
    const entries = fixtures.advise_uscore_open.response.payload.entries as Array<{ breakdown: unknown }>;
    const withBreakdown = entries.filter((e) => e.breakdown !== null).length;
    expect(document.querySelectorAll("#scatter circle").length).toBe(withBreakdown);
  });

  it("names the binding constraint when nothing survives", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(
        async () =>
          new Response(
            JSON.stringify({
              status: "ok",
              registry_digest: "x".repeat(64),
              payload: { excluded: 100, binding_constraint: "storage", entries: [] },
            }),
            { status: 200, headers: { "Content-Type": "application/json" } },
          ),
      ),
    );
    await panel.submit(openQuery("uscore", { storage: "Tiny" }));
    expect(document.getElementById("current")?.textContent).toContain("binding: storage");
  });
});

import { beforeEach, describe, expect, it } from "vitest";

import { LeaderboardView, sortedEntries } from "../src/leaderboard.js";
import type { LeaderboardPayload } from "../src/types.js";
import fixtures from "./fixtures/api.json";

const iouPayload = fixtures.leaderboard_iou_source.payload as LeaderboardPayload;
const uscorePayload = fixtures.leaderboard_uscore_source.payload as LeaderboardPayload;

function renderedModels(root: HTMLElement): string[] {
  return Array.from(root.querySelectorAll("tbody tr")).map(
    (row) => (row.children[1] as HTMLElement).textContent ?? "",
  );
}

describe("leaderboard view", () => {
  let root: HTMLElement;
  let view: LeaderboardView;

  beforeEach(() => {
    document.body.innerHTML = '<div id="board"></div>';
    root = document.getElementById("board") as HTMLElement;
    view = new LeaderboardView(root);
  });

  it("renders the server order verbatim", () => {
    view.setPayload(iouPayload);
    const models = renderedModels(root);
    expect(models[0]).toBe("RWKV-UNet");
    expect(models[1]).toBe("UTANet");
    expect(models).toEqual(iouPayload.entries.map((e) => e.model));
  });

  it("shows the published head for the composite metric", () => {
    view.setPayload(uscorePayload);
    expect(renderedModels(root)[0]).toBe("LGMSNet");
  });

  it("sorting is a pure reordering and reset restores server order", () => {
    view.setPayload(iouPayload);
    const serverOrder = renderedModels(root);
    view.toggleSort("value"); // descending
    view.toggleSort("value"); // ascending
    const ascending = renderedModels(root);
    expect(ascending).not.toEqual(serverOrder);
    expect([...ascending].sort()).toEqual([...serverOrder].sort()); // same multiset
    view.resetSort();
    expect(renderedModels(root)).toEqual(serverOrder);
  });

  it("sortedEntries never mutates the server rows", () => {
    const before = iouPayload.entries.map((e) => e.model);
    sortedEntries(iouPayload.entries, { column: "value", descending: false });
    expect(iouPayload.entries.map((e) => e.model)).toEqual(before);
  });

  it("renders significance glyphs from the server tiers", () => {
    view.setPayload(iouPayload);
    const glyphs = Array.from(root.querySelectorAll("tbody tr")).map(
      (row) => (row.children[3] as HTMLElement).textContent,
    );
    expect(glyphs[0]).toBe("****");
    expect(glyphs).toContain("-"); // unavailable tiers shown as dashes
  });

  it("renders an empty-state message for an empty registry", () => {
    view.setPayload({ ...iouPayload, entries: [] });
    expect(root.textContent).toContain("no models");
  });

  it("renders fetch errors", () => {
    view.setError("connection refused");
    expect(root.querySelector(".error")?.textContent).toContain("connection refused");
  });

  it("displays values exactly as served (two decimals)", () => {
    view.setPayload(iouPayload);
    const firstValue = root.querySelectorAll("tbody tr")[0].children[2].textContent;
    expect(firstValue).toBe("79.84");
  });
});

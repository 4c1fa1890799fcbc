import { describe, expect, it } from "vitest";

import { DEFAULT_STATE, QueryState, decodeState, encodeState, toAdviseBody } from "../src/state.js";
import fixtures from "./fixtures/api.json";

const MODALITIES = ["Ultrasound", "Fundus", "CT"];
const STORAGES = [null, "Tiny", "Small", "Medium", "Large"];
const COMPUTES = [null, "Low", "Medium", "High"];
const SPEEDS = [null, "Slow", "Medium", "Fast"];

function* allStates(): Generator<QueryState> {
  for (const modality of MODALITIES)
    for (const smallScale of [false, true])
      for (const storage of STORAGES)
        for (const compute of COMPUTES)
          for (const speed of SPEEDS)
            for (const labelKind of ["iou", "uscore"] as const)
              yield {
                modality,
                smallScale,
                irregularShape: smallScale,
                blurBoundary: !smallScale,
                storage,
                compute,
                speed,
                k: 7,
                labelKind,
              };
}

describe("query state", () => {
  it("serializes to exactly the advise request body", () => {
    const state: QueryState = {
      modality: "Ultrasound",
      smallScale: true,
      irregularShape: true,
      blurBoundary: true,
      storage: "Tiny",
      compute: null,
      speed: null,
      k: 100,
      labelKind: "uscore",
    };
    // the captured fixture stores the exact body the live server answered
    expect(toAdviseBody(state)).toEqual(fixtures.advise_uscore_storage_Tiny.request);
  });

  it("serializes the open iou query identically to the captured request", () => {
    const state: QueryState = {
      ...DEFAULT_STATE,
      smallScale: true,
      irregularShape: true,
      blurBoundary: true,
      k: 100,
      labelKind: "iou",
    };
    expect(toAdviseBody(state)).toEqual(fixtures.advise_iou_open.request);
  });

  it("round-trips through the URL losslessly", () => {
    let count = 0;
    for (const state of allStates()) {
      const again = decodeState(encodeState(state));
      expect(again).toEqual(state);
      expect(toAdviseBody(again)).toEqual(toAdviseBody(state));
      count += 1;
    }
    expect(count).toBe(MODALITIES.length * 2 * STORAGES.length * COMPUTES.length * SPEEDS.length * 2);
  });

  it("decodes an empty query to the defaults", () => {
    expect(decodeState("")).toEqual({ ...DEFAULT_STATE, smallScale: false });
  });

  it("rejects nonsense k values", () => {
    expect(decodeState("k=-3").k).toBe(DEFAULT_STATE.k);
    expect(decodeState("k=oops").k).toBe(DEFAULT_STATE.k);
  });

  it("omits unset constraints from the body", () => {
    const body = toAdviseBody(DEFAULT_STATE);
    expect(body.constraints).toEqual({});
    expect(Object.keys(body)).toEqual(
      expect.arrayContaining(["modality", "scale", "shape", "boundary", "constraints", "k", "label_kind"]),
    );
  });
});

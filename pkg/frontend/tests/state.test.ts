import { describe, expect, it } from "vitest";

import { decodeHash, defaultState, encodeHash, ExplorerState } from "../src/state.js";
import metadata from "../fixtures/metadata.json";

const dims = metadata.dimensions;

describe("url hash state", () => {
  it("round-trips the default state", () => {
    const state = defaultState("acceptance", dims);
    expect(decodeHash(encodeHash(state))).toEqual(state);
  });

  it("round-trips a fully loaded state", () => {
    const state: ExplorerState = {
      cube: "acceptance",
      levels: { provenance: "country", dating: "all", description: "all", groups: "all", technique: "technique" },
      filters: [
        { dim: "dating", level: "period", op: "eq", values: ["Medieval"] },
        { dim: "description", level: null, op: "contains", values: ["Zeuxippus"] },
        { dim: "provenance", level: "country", op: "in", values: ["Greece", "Turkey"] },
      ],
      axisOrder: ["provenance", "dating", "description", "groups", "technique"],
      measure: "count(samples)",
      compare: { left: "MEASURE count(samples);", right: "MEASURE count(facts);", axis: "provenance.country" },
    };
    const decoded = decodeHash(encodeHash(state));
    expect(decoded).toEqual(state);
    expect(decoded).not.toBe(state); // deep copy, not aliasing
    expect(decoded!.filters[0]).not.toBe(state.filters[0]);
  });

  it("survives unicode member labels", () => {
    const state = defaultState("acceptance", dims);
    state.filters.push({
      dim: "provenance",
      level: "site",
      op: "eq",
      values: ["⟨unknown site⟩"],
    });
    expect(decodeHash(encodeHash(state))).toEqual(state);
  });

  it("rejects garbage hashes", () => {
    expect(decodeHash("")).toBeNull();
    expect(decodeHash("#other")).toBeNull();
    expect(decodeHash("#s=%7Bnot-json")).toBeNull();
    expect(decodeHash("#s=" + encodeURIComponent('{"cube": 3}'))).toBeNull();
    expect(
      decodeHash("#s=" + encodeURIComponent('{"cube":"c","measure":"m","levels":{},"axisOrder":[],"filters":[{"dim":1}],"compare":null}')),
    ).toBeNull();
  });

  it("default state groups by the first dimension's coarsest level", () => {
    const state = defaultState("acceptance", dims);
    expect(state.levels["provenance"]).toBe("country");
    expect(state.levels["dating"]).toBe("all");
  });
});

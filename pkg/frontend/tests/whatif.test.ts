import { describe, expect, it } from "vitest";

import {
  initialState,
  scoreRequest,
  toggleEntity,
  withOverride,
} from "../src/whatif.js";

describe("what-if state", () => {
  it("starts with no overrides and no exclusions", () => {
    const state = initialState("d001");
    expect(state.docId).toBe("d001");
    expect(state.overrides).toStrictEqual({});
    expect(state.excluded.size).toBe(0);
  });

  it("toggling an entity twice returns to the baseline set", () => {
    const base = initialState("d001");
    const once = toggleEntity(base, "anna");
    const twice = toggleEntity(once, "anna");
    expect(once.excluded.has("anna")).toBe(true);
    expect(twice.excluded.has("anna")).toBe(false);
    // the earlier states are untouched
    expect(base.excluded.size).toBe(0);
    expect(once.excluded.size).toBe(1);
  });

  it("withOverride replaces a knob without mutating the old state", () => {
    const base = initialState("d001");
    const next = withOverride(base, "person_aggregator", "q90");
    expect(next.overrides.person_aggregator).toBe("q90");
    expect(base.overrides.person_aggregator).toBeUndefined();
  });

  it("setting an override to undefined removes it", () => {
    const withKnob = withOverride(initialState("d001"), "tau_p", 0.8);
    const cleared = withOverride(withKnob, "tau_p", undefined);
    expect("tau_p" in cleared.overrides).toBe(false);
  });
});

describe("scoreRequest", () => {
  it("carries only the document id for the baseline state", () => {
    expect(scoreRequest(initialState("d001"))).toStrictEqual({
      doc_id: "d001",
    });
  });

  it("sends only the knobs that were overridden", () => {
    const state = withOverride(initialState("d001"), "location_aggregator", "q75");
    expect(scoreRequest(state)).toStrictEqual({
      doc_id: "d001",
      config: { location_aggregator: "q75" },
    });
  });

  it("sorts exclusions for stable payloads", () => {
    let state = initialState("d001");
    state = toggleEntity(state, "zoe");
    state = toggleEntity(state, "anna");
    expect(scoreRequest(state)).toStrictEqual({
      doc_id: "d001",
      exclude: ["anna", "zoe"],
    });
  });

  it("combines overrides and exclusions", () => {
    let state = withOverride(initialState("d001"), "person_mode", "aggregate");
    state = toggleEntity(state, "ben");
    expect(scoreRequest(state)).toStrictEqual({
      doc_id: "d001",
      config: { person_mode: "aggregate" },
      exclude: ["ben"],
    });
  });
});

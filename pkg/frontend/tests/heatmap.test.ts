import { describe, expect, it } from "vitest";

import { heatColor } from "../src/color.js";
import {
  columnMaxima,
  paint,
  personHeatmap,
  stripHeatmap,
} from "../src/heatmap.js";
import type { MatrixBreakdown, StripBreakdown } from "../src/types.js";

const GRID: MatrixBreakdown = {
  person_ids: ["anna", "ben"],
  matrix: [
    [0.9, 0.3],
    [0.5, 0.8],
  ],
  skipped: [["carla", "empty_references"]],
};

const STRIP: StripBreakdown = {
  labels: ["paris", "rome"],
  values: [0.7, 0.65],
  skipped: [],
};

describe("personHeatmap", () => {
  it("builds a faces-by-persons grid", () => {
    const model = personHeatmap(GRID, [0.45, 1]);
    expect(model.kind).toBe("grid");
    expect(model.rowLabels).toStrictEqual(["face 1", "face 2"]);
    expect(model.columnLabels).toStrictEqual(["anna", "ben"]);
    expect(model.cells[0]![1]!.value).toBe(0.3);
    expect(model.cells[1]![0]!.color).toBe(heatColor(0.5, [0.45, 1]));
    expect(model.skipped).toStrictEqual([["carla", "empty_references"]]);
  });

  it("paints row-major pixels", () => {
    const model = personHeatmap(GRID, [0.45, 1]);
    expect(paint(model)).toStrictEqual(
      [0.9, 0.3, 0.5, 0.8].map((v) => heatColor(v, [0.45, 1])),
    );
  });

  it("computes per-entity column maxima", () => {
    expect(columnMaxima(personHeatmap(GRID, [0.45, 1]))).toStrictEqual([
      0.9, 0.8,
    ]);
  });
});

describe("stripHeatmap", () => {
  it("builds a single-row strip", () => {
    const model = stripHeatmap(STRIP, [0.6, 1], "geo feature");
    expect(model.kind).toBe("strip");
    expect(model.rowLabels).toStrictEqual(["geo feature"]);
    expect(model.cells).toHaveLength(1);
    expect(model.cells[0]).toHaveLength(2);
    expect(paint(model)).toStrictEqual([
      heatColor(0.7, [0.6, 1]),
      heatColor(0.65, [0.6, 1]),
    ]);
  });

  it("keeps the column order of the payload", () => {
    const model = stripHeatmap(STRIP, [0.6, 1], "geo feature");
    expect(model.columnLabels).toStrictEqual(["paris", "rome"]);
  });
});

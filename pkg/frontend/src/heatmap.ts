/** Heatmap cell models and rendering.
 *
 *  Persons get a full faces x persons grid; locations, events and
 *  context nouns get a one-row strip (one image feature against N
 *  candidates). `paint` flattens a model to its row-major pixel colors,
 *  which is what conformance checks compare: two models are visually
 *  identical exactly when their paint arrays are equal.
 */

import { heatColor, type Interval } from "./color.js";
import type { MatrixBreakdown, StripBreakdown } from "./types.js";

export interface HeatmapCell {
  row: string;
  column: string;
  value: number;
  color: string;
}

export interface HeatmapModel {
  kind: "grid" | "strip";
  rowLabels: string[];
  columnLabels: string[];
  cells: HeatmapCell[][];
  /** entities left out of the comparison, with the reason */
  skipped: [string, string][];
}

export function personHeatmap(
  breakdown: MatrixBreakdown,
  interval: Interval,
): HeatmapModel {
  const rowLabels = breakdown.matrix.map((_, i) => `face ${i + 1}`);
  const cells = breakdown.matrix.map((row, i) =>
    row.map((value, j) => ({
      row: rowLabels[i] ?? "",
      column: breakdown.person_ids[j] ?? "",
      value,
      color: heatColor(value, interval),
    })),
  );
  return {
    kind: "grid",
    rowLabels,
    columnLabels: [...breakdown.person_ids],
    cells,
    skipped: [...breakdown.skipped],
  };
}

export function stripHeatmap(
  breakdown: StripBreakdown,
  interval: Interval,
  rowLabel: string,
): HeatmapModel {
  const cells = breakdown.values.map((value, j) => ({
    row: rowLabel,
    column: breakdown.labels[j] ?? "",
    value,
    color: heatColor(value, interval),
  }));
  return {
    kind: "strip",
    rowLabels: [rowLabel],
    columnLabels: [...breakdown.labels],
    cells: [cells],
    skipped: [...breakdown.skipped],
  };
}

/** Row-major flat list of cell colors: the rendered pixels. */
export function paint(model: HeatmapModel): string[] {
  return model.cells.flat().map((cell) => cell.color);
}

/** Highest cell value per column; the document measure is the maximum
 *  over these, so the runner-up predicts what an exclusion reveals. */
export function columnMaxima(model: HeatmapModel): number[] {
  return model.columnLabels.map((_, j) =>
    Math.max(...model.cells.map((row) => row[j]?.value ?? -Infinity)),
  );
}

export function renderHeatmap(
  doc: Document,
  model: HeatmapModel,
): HTMLTableElement {
  const table = doc.createElement("table");
  table.className = "heatmap";
  const header = table.insertRow();
  header.insertCell();
  for (const label of model.columnLabels) {
    const cell = header.insertCell();
    cell.textContent = label;
  }
  model.cells.forEach((row, i) => {
    const tr = table.insertRow();
    const name = tr.insertCell();
    name.textContent = model.rowLabels[i] ?? "";
    for (const cell of row) {
      const td = tr.insertCell();
      td.style.backgroundColor = cell.color;
      td.title = `${cell.column}: ${cell.value.toFixed(4)}`;
      td.textContent = cell.value.toFixed(2);
    }
  });
  return table;
}

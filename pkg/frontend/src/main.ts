/** Dashboard wiring: ranking table on the left, document detail with
 *  what-if controls on the right, triage marks stored locally.
 */

import { ApiClient, ApiError } from "./api.js";
import { buildDetailView, type DetailView } from "./detail.js";
import { renderHeatmap } from "./heatmap.js";
import { collectRanking } from "./ranking.js";
import { createMarkStore, MARKS, type Mark } from "./triage.js";
import {
  initialState,
  scoreRequest,
  toggleEntity,
  withOverride,
  type WhatIfState,
} from "./whatif.js";
import {
  MEASURE_FOR_TYPE,
  type ColorIntervals,
  type RankEntryPayload,
} from "./types.js";

const api = new ApiClient(
  (window as { XMEC_BASE_URL?: string }).XMEC_BASE_URL ?? "",
);
const marks = createMarkStore(window.localStorage);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function showBanner(message: string | null): void {
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = message ?? "";
  banner.hidden = message === null;
}

async function guarded<T>(work: () => Promise<T>): Promise<T | null> {
  try {
    const result = await work();
    showBanner(null);
    return result;
  } catch (error) {
    if (error instanceof ApiError && error.status === 0) {
      showBanner("service unreachable; retry when the engine is back");
    } else {
      showBanner(error instanceof Error ? error.message : String(error));
    }
    return null;
  }
}

let intervals: ColorIntervals = {};
let whatIf: WhatIfState | null = null;

function renderGauges(view: DetailView): void {
  const host = el<HTMLDivElement>("gauges");
  host.replaceChildren();
  for (const gauge of view.gauges) {
    const box = document.createElement("div");
    box.className = "gauge";
    box.style.borderColor = gauge.color;
    const label = gauge.value === null
      ? `${gauge.measure}: n/a (${gauge.reason ?? "absent"})`
      : `${gauge.measure}: ${gauge.value.toFixed(4)}`;
    box.textContent = label;
    host.appendChild(box);
  }
}

function renderHeatmaps(view: DetailView): void {
  const host = el<HTMLDivElement>("heatmaps");
  host.replaceChildren();
  for (const [measure, model] of Object.entries(view.heatmaps)) {
    if (!model) continue;
    const section = document.createElement("section");
    const title = document.createElement("h3");
    title.textContent = measure;
    section.appendChild(title);
    section.appendChild(renderHeatmap(document, model));
    if (model.skipped.length) {
      const note = document.createElement("p");
      note.textContent = model.skipped
        .map(([entity, reason]) => `${entity}: ${reason}`)
        .join(", ");
      section.appendChild(note);
    }
    host.appendChild(section);
  }
}

function renderToggles(view: DetailView, mentioned: string[]): void {
  const host = el<HTMLDivElement>("toggles");
  host.replaceChildren();
  for (const entityId of mentioned) {
    const button = document.createElement("button");
    const excluded = view.excluded.includes(entityId);
    button.textContent = `${excluded ? "include" : "exclude"} ${entityId}`;
    button.addEventListener("click", () => {
      if (!whatIf) return;
      whatIf = toggleEntity(whatIf, entityId);
      void refreshWhatIf();
    });
    host.appendChild(button);
  }
}

function renderMarkButtons(docId: string): void {
  const host = el<HTMLDivElement>("marks");
  host.replaceChildren();
  const current = marks.get(docId);
  for (const mark of MARKS) {
    const button = document.createElement("button");
    button.textContent = mark === current ? `[${mark}]` : mark;
    button.addEventListener("click", () => {
      marks.set(docId, mark as Mark);
      renderMarkButtons(docId);
    });
    host.appendChild(button);
  }
}

async function refreshWhatIf(): Promise<void> {
  if (!whatIf) return;
  const state = whatIf;
  const payload = await guarded(() => api.score(scoreRequest(state)));
  if (!payload) return;
  const detail = await guarded(() => api.detail(state.docId));
  const view = buildDetailView(payload, intervals, detail?.metadata);
  renderGauges(view);
  renderHeatmaps(view);
  const mentioned = detail
    ? [
        ...detail.metadata.person_mentions,
        ...detail.metadata.location_mentions,
        ...detail.metadata.event_mentions,
      ]
    : [];
  renderToggles(view, mentioned);
  renderMarkButtons(state.docId);
}

async function openDocument(docId: string): Promise<void> {
  whatIf = initialState(docId);
  el<HTMLHeadingElement>("detail-title").textContent = docId;
  await refreshWhatIf();
}

function renderTable(entries: RankEntryPayload[]): void {
  const body = el<HTMLTableSectionElement>("ranking-body");
  body.replaceChildren();
  for (const entry of entries) {
    const row = body.insertRow();
    row.insertCell().textContent = String(entry.rank);
    row.insertCell().textContent = entry.doc_id;
    row.insertCell().textContent = entry.variant;
    row.insertCell().textContent = entry.score.toFixed(4);
    row.insertCell().textContent = marks.get(entry.doc_id);
    row.addEventListener("click", () => void openDocument(entry.doc_id));
  }
}

async function refreshRanking(): Promise<void> {
  const type = el<HTMLSelectElement>("rank-type").value;
  const order = el<HTMLSelectElement>("rank-order").value as "asc" | "desc";
  const entries = await guarded(() =>
    collectRanking(api, { type, order, pageSize: 100 }),
  );
  if (entries) renderTable(entries);
}

async function bootstrap(): Promise<void> {
  const config = await guarded(() => api.config());
  if (config) {
    intervals = config.color_intervals;
    const aggregator = el<HTMLSelectElement>("whatif-aggregator");
    aggregator.addEventListener("change", () => {
      if (!whatIf) return;
      const spec = aggregator.value || undefined;
      const measureKey = MEASURE_FOR_TYPE[el<HTMLSelectElement>("rank-type").value];
      whatIf = withOverride(
        whatIf,
        measureKey === "cmps" ? "person_aggregator" : "location_aggregator",
        spec,
      );
      void refreshWhatIf();
    });
    const tau = el<HTMLInputElement>("whatif-tau");
    tau.addEventListener("change", () => {
      if (!whatIf) return;
      const value = tau.value === "" ? undefined : Number(tau.value);
      whatIf = withOverride(whatIf, "tau_p", value);
      void refreshWhatIf();
    });
  }
  const stats = await guarded(() => api.stats());
  if (stats) {
    el<HTMLSpanElement>("corpus-label").textContent =
      `${stats.corpus_id}: ${stats.n_documents} documents, ${stats.n_entities} entities`;
  }
  el<HTMLSelectElement>("rank-type").addEventListener("change", () =>
    void refreshRanking(),
  );
  el<HTMLSelectElement>("rank-order").addEventListener("change", () =>
    void refreshRanking(),
  );
  await refreshRanking();
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  void bootstrap();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", () => void bootstrap());
}

/** Payload shapes of the scoring service API, mirrored field by field.
 *  The UI never recomputes measures; these types are the whole contract. */

export type MeasureName = "cmps" | "cmls" | "cmes" | "cmcs";

export const MEASURE_NAMES: readonly MeasureName[] = [
  "cmps",
  "cmls",
  "cmes",
  "cmcs",
];

export const MEASURE_FOR_TYPE: Record<string, MeasureName> = {
  person: "cmps",
  location: "cmls",
  event: "cmes",
  context: "cmcs",
};

export interface MeasureValue {
  value: number | null;
  reason: string | null;
}

/** faces x persons similarity grid; skipped rows are (entity, reason) pairs */
export interface MatrixBreakdown {
  person_ids: string[];
  matrix: number[][];
  skipped: [string, string][];
}

/** one value per label: entities for cmls/cmes, nouns for cmcs */
export interface StripBreakdown {
  labels: string[];
  values: number[];
  skipped: [string, string][];
}

export interface ScorePayload {
  doc_id: string;
  measures: Record<MeasureName, MeasureValue>;
  person_breakdown: MatrixBreakdown;
  location_breakdown: StripBreakdown;
  event_breakdown: StripBreakdown;
  context_breakdown: StripBreakdown;
  config_fingerprint?: string;
  excluded?: string[];
}

export interface DocumentMetadata {
  person_mentions: string[];
  location_mentions: string[];
  event_mentions: string[];
  n_faces: number;
  n_nouns: number;
  scene_kind: string | null;
  entity_labels: Record<string, string>;
}

export type ColorIntervals = Record<string, [number, number]>;

export interface DetailPayload extends ScorePayload {
  color_intervals: ColorIntervals;
  metadata: DocumentMetadata;
}

export interface TypeStatsPayload {
  documents: number;
  unique_entities: number | null;
  mean_unique: number | null;
}

export interface StatsPayload {
  corpus_id: string;
  n_documents: number;
  n_entities: number;
  stats: Record<string, TypeStatsPayload>;
}

export interface ConfigPayload {
  tau_p: number;
  person_mode: string;
  person_aggregator: string;
  location_aggregator: string;
  event_aggregator: string;
  quantile_options: number[];
  recall_levels: number[];
  color_intervals: ColorIntervals;
  rng_algorithm: string;
}

export interface RankEntryPayload {
  rank: number;
  doc_id: string;
  variant: "clean" | "tampered";
  score: number;
}

export interface RankPage {
  type: string;
  measure: MeasureName;
  order: "asc" | "desc";
  page: number;
  page_size: number;
  total: number;
  entries: RankEntryPayload[];
}

export interface TestsetSummary {
  name: string;
  entity_type: string;
  strategy: string;
  seed: number;
  n_documents: number;
  n_fallbacks: number;
}

export interface ScoringOverrides {
  tau_p?: number;
  person_mode?: string;
  person_aggregator?: string;
  location_aggregator?: string;
  event_aggregator?: string;
}

export interface ScoreRequest {
  doc_id: string;
  config?: ScoringOverrides;
  exclude?: string[];
}

export interface EvaluateRequest {
  entity_type: string;
  strategy: string;
  seed: number;
  subset?: string;
  config?: ScoringOverrides;
}

export interface ReportPayload {
  format: string;
  version: number;
  corpus_id: string;
  entity_type: string;
  strategy: string;
  seed: number;
  measure: MeasureName;
  subset: string;
  n_documents: number;
  va: number;
  auc: number;
  ap_clean: Record<string, number>;
  ap_tampered: Record<string, number>;
}

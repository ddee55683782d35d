/** Document detail view: per-measure gauges plus one heatmap each.
 *
 *  Everything is derived from a single score payload and the configured
 *  color intervals; the builder is pure so a refresh that re-fetches the
 *  same payload reproduces the identical view.
 */

import { colorOrAbsent, type Interval } from "./color.js";
import { personHeatmap, stripHeatmap, type HeatmapModel } from "./heatmap.js";
import {
  MEASURE_NAMES,
  type ColorIntervals,
  type DocumentMetadata,
  type MeasureName,
  type ScorePayload,
} from "./types.js";

export interface Gauge {
  measure: MeasureName;
  value: number | null;
  reason: string | null;
  color: string;
}

export interface DetailView {
  docId: string;
  gauges: Gauge[];
  heatmaps: Record<MeasureName, HeatmapModel | null>;
  excluded: string[];
  metadata?: DocumentMetadata;
}

const FALLBACK_INTERVAL: Interval = [0, 1];

function interval(intervals: ColorIntervals, measure: MeasureName): Interval {
  return intervals[measure] ?? FALLBACK_INTERVAL;
}

export function buildDetailView(
  payload: ScorePayload,
  intervals: ColorIntervals,
  metadata?: DocumentMetadata,
): DetailView {
  const gauges = MEASURE_NAMES.map((measure) => {
    const result = payload.measures[measure];
    return {
      measure,
      value: result.value,
      reason: result.reason,
      color: colorOrAbsent(result.value, interval(intervals, measure)),
    };
  });

  const heatmaps: Record<MeasureName, HeatmapModel | null> = {
    cmps:
      payload.measures.cmps.value === null
        ? null
        : personHeatmap(payload.person_breakdown, interval(intervals, "cmps")),
    cmls:
      payload.measures.cmls.value === null
        ? null
        : stripHeatmap(
            payload.location_breakdown,
            interval(intervals, "cmls"),
            "geo feature",
          ),
    cmes:
      payload.measures.cmes.value === null
        ? null
        : stripHeatmap(
            payload.event_breakdown,
            interval(intervals, "cmes"),
            "scene feature",
          ),
    cmcs:
      payload.measures.cmcs.value === null
        ? null
        : stripHeatmap(
            payload.context_breakdown,
            interval(intervals, "cmcs"),
            "scene context",
          ),
  };

  return {
    docId: payload.doc_id,
    gauges,
    heatmaps,
    excluded: [...(payload.excluded ?? [])],
    metadata,
  };
}

/** What-if re-scoring state: aggregator and threshold overrides plus
 *  entity include/exclude toggles.
 *
 *  The state is immutable; each change returns a new state, and
 *  `scoreRequest` serializes exactly the knobs that differ from the
 *  server defaults so the service fingerprints stay comparable.
 */

import type { ScoreRequest, ScoringOverrides } from "./types.js";

export interface WhatIfState {
  docId: string;
  overrides: ScoringOverrides;
  excluded: ReadonlySet<string>;
}

export function initialState(docId: string): WhatIfState {
  return { docId, overrides: {}, excluded: new Set() };
}

export function withOverride<K extends keyof ScoringOverrides>(
  state: WhatIfState,
  key: K,
  value: ScoringOverrides[K] | undefined,
): WhatIfState {
  const overrides = { ...state.overrides };
  if (value === undefined) {
    delete overrides[key];
  } else {
    overrides[key] = value;
  }
  return { ...state, overrides };
}

/** Flip one entity in or out of the comparison. */
export function toggleEntity(state: WhatIfState, entityId: string): WhatIfState {
  const excluded = new Set(state.excluded);
  if (excluded.has(entityId)) {
    excluded.delete(entityId);
  } else {
    excluded.add(entityId);
  }
  return { ...state, excluded };
}

export function scoreRequest(state: WhatIfState): ScoreRequest {
  const request: ScoreRequest = { doc_id: state.docId };
  if (Object.keys(state.overrides).length) {
    request.config = { ...state.overrides };
  }
  if (state.excluded.size) {
    request.exclude = [...state.excluded].sort();
  }
  return request;
}

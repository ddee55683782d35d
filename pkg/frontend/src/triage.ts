/** Local triage state: assessor marks and queue filtering.
 *
 *  Marks live entirely in browser storage and never travel to the
 *  engine; the queue filter is a pure function over ranking entries.
 */

import type { RankEntryPayload } from "./types.js";

export type Mark = "credible" | "suspicious" | "unreviewed";

export const MARKS: readonly Mark[] = ["credible", "suspicious", "unreviewed"];

type StorageLike = Pick<Storage, "getItem" | "setItem">;

const STORAGE_KEY = "assessor-marks";

export interface MarkStore {
  get(docId: string): Mark;
  set(docId: string, mark: Mark): void;
  all(): Record<string, Mark>;
}

export function createMarkStore(storage: StorageLike): MarkStore {
  function load(): Record<string, Mark> {
    try {
      const raw = storage.getItem(STORAGE_KEY);
      if (!raw) return {};
      const parsed = JSON.parse(raw) as Record<string, string>;
      const marks: Record<string, Mark> = {};
      for (const [docId, mark] of Object.entries(parsed)) {
        if ((MARKS as readonly string[]).includes(mark)) {
          marks[docId] = mark as Mark;
        }
      }
      return marks;
    } catch {
      return {};
    }
  }

  return {
    get(docId) {
      return load()[docId] ?? "unreviewed";
    },
    set(docId, mark) {
      const marks = load();
      marks[docId] = mark;
      storage.setItem(STORAGE_KEY, JSON.stringify(marks));
    },
    all() {
      return load();
    },
  };
}

export interface QueueFilter {
  minScore?: number;
  maxScore?: number;
  variants?: ("clean" | "tampered")[];
  marks?: Mark[];
}

/** Filter ranking entries without mutating them or touching the engine. */
export function filterQueue(
  entries: readonly RankEntryPayload[],
  filter: QueueFilter,
  store: MarkStore,
): RankEntryPayload[] {
  return entries.filter((entry) => {
    if (filter.minScore !== undefined && entry.score < filter.minScore) {
      return false;
    }
    if (filter.maxScore !== undefined && entry.score > filter.maxScore) {
      return false;
    }
    if (filter.variants && !filter.variants.includes(entry.variant)) {
      return false;
    }
    if (filter.marks && !filter.marks.includes(store.get(entry.doc_id))) {
      return false;
    }
    return true;
  });
}

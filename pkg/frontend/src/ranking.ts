/** Paginated ranking access: a page walker that enumerates every entry
 *  exactly once, in server order, until the service returns an empty
 *  page. The walker never re-sorts; ranks arrive from the service.
 */

import type { ApiClient } from "./api.js";
import type { RankEntryPayload } from "./types.js";

export interface RankWalk {
  type: string;
  testset?: string;
  order?: "asc" | "desc";
  pageSize?: number;
}

export async function* walkRanking(
  api: ApiClient,
  walk: RankWalk,
): AsyncGenerator<RankEntryPayload> {
  let page = 1;
  for (;;) {
    const result = await api.rank({
      type: walk.type,
      testset: walk.testset,
      order: walk.order,
      page,
      pageSize: walk.pageSize,
    });
    if (!result.entries.length) {
      return;
    }
    yield* result.entries;
    page += 1;
  }
}

export async function collectRanking(
  api: ApiClient,
  walk: RankWalk,
): Promise<RankEntryPayload[]> {
  const entries: RankEntryPayload[] = [];
  for await (const entry of walkRanking(api, walk)) {
    entries.push(entry);
  }
  return entries;
}

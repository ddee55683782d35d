/** Thin fetch client for the scoring service.
 *
 *  Every method is a single round trip returning the parsed payload;
 *  no response is cached or recomputed here, so the view layer always
 *  reflects server-computed values.
 */

import type {
  ConfigPayload,
  DetailPayload,
  EvaluateRequest,
  RankPage,
  ReportPayload,
  ScorePayload,
  ScoreRequest,
  ScoringOverrides,
  StatsPayload,
  TestsetSummary,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(status === 0 ? `service unreachable: ${detail}` : `${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export interface RankQuery {
  type: string;
  testset?: string;
  order?: "asc" | "desc";
  page?: number;
  pageSize?: number;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    } catch (error) {
      throw new ApiError(0, error instanceof Error ? error.message : String(error));
    }
    const body = await response.text();
    if (!response.ok) {
      let detail = body;
      try {
        detail = JSON.parse(body).detail ?? body;
      } catch {
        // non-JSON error body; keep the raw text
      }
      throw new ApiError(response.status, String(detail));
    }
    return JSON.parse(body) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  stats(): Promise<StatsPayload> {
    return this.request("/corpus/stats");
  }

  config(): Promise<ConfigPayload> {
    return this.request("/config");
  }

  scores(docId: string, overrides?: ScoringOverrides): Promise<ScorePayload> {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(overrides ?? {})) {
      if (value !== undefined) params.set(key, String(value));
    }
    const query = params.size ? `?${params.toString()}` : "";
    return this.request(`/documents/${encodeURIComponent(docId)}/scores${query}`);
  }

  detail(docId: string): Promise<DetailPayload> {
    return this.request(`/documents/${encodeURIComponent(docId)}/detail`);
  }

  rank(query: RankQuery): Promise<RankPage> {
    const params = new URLSearchParams({ type: query.type });
    if (query.testset) params.set("testset", query.testset);
    if (query.order) params.set("order", query.order);
    if (query.page) params.set("page", String(query.page));
    if (query.pageSize) params.set("page_size", String(query.pageSize));
    return this.request(`/rank?${params.toString()}`);
  }

  listTestsets(): Promise<{ testsets: string[] }> {
    return this.request("/testsets");
  }

  createTestset(body: {
    entity_type: string;
    strategy: string;
    seed: number;
    name?: string;
  }): Promise<TestsetSummary> {
    return this.post("/testsets", body);
  }

  score(body: ScoreRequest): Promise<ScorePayload> {
    return this.post("/score", body);
  }

  evaluate(body: EvaluateRequest): Promise<ReportPayload> {
    return this.post("/evaluate", body);
  }
}

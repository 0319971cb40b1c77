// Thin fetch client for the placement-test API. Pass a custom fetch
// function to observe or mock traffic in tests.

import type {
  AnswerAccepted,
  ApiErrorPayload,
  CompetenceSummary,
  ResultPayload,
  SessionCreated,
  SessionStatePayload,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** HTTP-level failure carrying the server's error payload when present. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly payload: ApiErrorPayload | null,
  ) {
    super(payload?.message ?? `request failed with status ${status}`);
    this.name = "ApiError";
  }

  get code(): string {
    return this.payload?.code ?? "internal";
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (cause) {
      throw new ApiError(0, { code: "internal", message: "network failure" });
    }
    const text = await response.text();
    const payload = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ApiError(response.status, payload as ApiErrorPayload | null);
    }
    return payload as T;
  }

  listCompetences(): Promise<CompetenceSummary[]> {
    return this.request("/api/competences");
  }

  createSession(
    learnerRef: string,
    competenceRef: string,
    mode?: string,
  ): Promise<SessionCreated> {
    return this.request("/api/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(mode ? { learnerRef, competenceRef, mode } : { learnerRef, competenceRef }),
    });
  }

  submitAnswer(sessionId: string, itemId: string, choiceId: string): Promise<AnswerAccepted> {
    return this.request(`/api/sessions/${encodeURIComponent(sessionId)}/answers`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ itemId, choiceId }),
    });
  }

  sessionState(sessionId: string): Promise<SessionStatePayload> {
    return this.request(`/api/sessions/${encodeURIComponent(sessionId)}`);
  }

  result(sessionId: string): Promise<ResultPayload> {
    return this.request(`/api/sessions/${encodeURIComponent(sessionId)}/result`);
  }
}

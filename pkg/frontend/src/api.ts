/** Typed client for the review-service API; the only server surface we touch. */

import type {
  Decision,
  DecisionResponse,
  NextTaskResponse,
  PairDetail,
  Stats,
  TaskView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }

  get isAuth(): boolean {
    return this.status === 401 || this.status === 403;
  }

  get isConflict(): boolean {
    return this.status === 409;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init: RequestInit = {}): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      ...init,
      headers: {
        Authorization: `Bearer ${this.token}`,
        "Content-Type": "application/json",
        ...(init.headers ?? {}),
      },
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  async nextTask(reviewer: string): Promise<TaskView | null> {
    const payload = await this.request<NextTaskResponse>(
      `/api/tasks/next?reviewer=${encodeURIComponent(reviewer)}`,
    );
    return payload.task;
  }

  async submitDecision(taskId: string, decision: Decision): Promise<DecisionResponse> {
    return this.request<DecisionResponse>(
      `/api/tasks/${encodeURIComponent(taskId)}/decision`,
      { method: "POST", body: JSON.stringify({ decision }) },
    );
  }

  async pairDetail(pairId: string): Promise<PairDetail> {
    return this.request<PairDetail>(`/api/pairs/${encodeURIComponent(pairId)}`);
  }

  async stats(): Promise<Stats> {
    return this.request<Stats>("/api/stats");
  }
}

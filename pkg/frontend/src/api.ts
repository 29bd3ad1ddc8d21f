import type {
  ItemView,
  ScoreAck,
  ScoreSubmission,
  TaskInfo,
  TaskReport,
} from "./types";

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

/** Non-2xx response from the service. `status` distinguishes validation
 * (400), unknown ids (404) and phase/duplicate conflicts (409). */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

/** The request never reached the service (offline, DNS, aborted). */
export class NetworkError extends Error {
  constructor(cause: unknown) {
    super(`network failure: ${String(cause)}`);
    this.name = "NetworkError";
  }
}

/** Thin typed client over the five service endpoints. `fetchImpl` is
 * injectable so tests can run against an in-memory service. */
export class CmsApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (...args) =>
      (globalThis.fetch as unknown as FetchLike)(...args),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    let response: Awaited<ReturnType<FetchLike>>;
    try {
      response = await this.fetchImpl(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new NetworkError(err);
    }
    const payload = (await response.json()) as Record<string, unknown>;
    if (response.status < 200 || response.status >= 300) {
      throw new ApiError(response.status, String(payload["detail"] ?? ""));
    }
    return payload as T;
  }

  getTask(taskId: string): Promise<TaskInfo> {
    return this.request("GET", `/tasks/${encodeURIComponent(taskId)}`);
  }

  nextItem(taskId: string, annotator: string): Promise<ItemView> {
    const q = new URLSearchParams({ annotator });
    return this.request(
      "GET",
      `/tasks/${encodeURIComponent(taskId)}/next?${q.toString()}`,
    );
  }

  submitScore(taskId: string, submission: ScoreSubmission): Promise<ScoreAck> {
    return this.request(
      "POST",
      `/tasks/${encodeURIComponent(taskId)}/scores`,
      submission,
    );
  }

  getReport(taskId: string): Promise<TaskReport> {
    return this.request("GET", `/tasks/${encodeURIComponent(taskId)}/report`);
  }
}

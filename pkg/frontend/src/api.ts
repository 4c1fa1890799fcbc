import type {
  AdvisePayload,
  ApiEnvelope,
  DatasetsPayload,
  LeaderboardPayload,
} from "./types.js";
import type { AdviseBody } from "./state.js";

export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
  }
}

async function readEnvelope<P>(response: Response): Promise<ApiEnvelope<P>> {
  if (!response.ok) {
    let detail = `${response.status} ${response.statusText}`;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body: keep the status line
    }
    throw new ApiError(detail, response.status);
  }
  return (await response.json()) as ApiEnvelope<P>;
}

export class ApiClient {
  // at most one advise request in flight; the latest submission wins
  private adviseController: AbortController | null = null;

  constructor(private readonly base: string = "") {}

  private url(path: string): string {
    return `${this.base}/api/v1${path}`;
  }

  async leaderboard(metric: string, scope: string): Promise<ApiEnvelope<LeaderboardPayload>> {
    const query = new URLSearchParams({ metric, scope });
    return readEnvelope(await fetch(this.url(`/leaderboard?${query}`)));
  }

  async datasets(): Promise<ApiEnvelope<DatasetsPayload>> {
    return readEnvelope(await fetch(this.url("/datasets")));
  }

  /** Resolves null when superseded by a newer submission. */
  async advise(body: AdviseBody): Promise<ApiEnvelope<AdvisePayload> | null> {
    this.adviseController?.abort();
    const controller = new AbortController();
    this.adviseController = controller;
    try {
      const response = await fetch(this.url("/advise"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
        signal: controller.signal,
      });
      return await readEnvelope<AdvisePayload>(response);
    } catch (error) {
      if (controller.signal.aborted) return null;
      throw error;
    } finally {
      if (this.adviseController === controller) this.adviseController = null;
    }
  }
}

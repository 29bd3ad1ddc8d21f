import { ApiError, CmsApiClient, NetworkError } from "./api";
import { OfflineQueue } from "./queue";
import type { ItemView, Phase, PhaseProgress } from "./types";

export interface Banner {
  kind: "offline" | "conflict" | "error";
  text: string;
  retryable: boolean;
}

/** One annotator's scoring session.
 *
 * Holds only the current item view — never a history of payloads — so a
 * reference string can exist in memory solely while the service says the
 * annotator is in phase 2. Phase transitions are entirely server-driven:
 * the controller renders whatever `next` returns.
 */
export class SessionController {
  view: ItemView | null = null;
  progress: PhaseProgress | null = null;
  banner: Banner | null = null;
  readonly queue = new OfflineQueue();

  constructor(
    private readonly api: CmsApiClient,
    readonly taskId: string,
    readonly annotator: string,
  ) {}

  /** Re-sync view and progress from the service. */
  async refresh(): Promise<void> {
    try {
      const [info, view] = await Promise.all([
        this.api.getTask(this.taskId),
        this.api.nextItem(this.taskId, this.annotator),
      ]);
      if (view.phase === "P1" && "reference" in view) {
        // A phase-1 payload must never carry a reference; drop it rather
        // than let it reach the DOM.
        delete (view as Record<string, unknown>)["reference"];
      }
      this.view = view;
      this.progress = info.progress[this.annotator] ?? null;
      this.banner = null;
    } catch (err) {
      if (err instanceof NetworkError) {
        this.banner = {
          kind: "offline",
          text: "Service unreachable — check your connection and retry.",
          retryable: true,
        };
        return;
      }
      if (err instanceof ApiError) {
        this.banner = { kind: "error", text: err.detail, retryable: false };
        return;
      }
      throw err;
    }
  }

  /** Submit the slider value for the item currently on screen.
   *
   * 2xx advances to the next item; 409 (duplicate or phase conflict)
   * shows the conflict and re-syncs so the single stored score stands;
   * network failure queues the submission for an idempotent retry.
   */
  async submit(value: number): Promise<void> {
    const view = this.view;
    if (!view || view.phase === "DONE") return;
    if (!(value >= 0 && value <= 1)) {
      this.banner = {
        kind: "error",
        text: `score must be in [0, 1], got ${value}`,
        retryable: false,
      };
      return;
    }
    const submission = {
      annotator: this.annotator,
      item: view.item,
      phase: view.phase as Phase,
      score: value,
    };
    try {
      await this.api.submitScore(this.taskId, submission);
      await this.refresh();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        await this.refresh();
        this.banner = { kind: "conflict", text: err.detail, retryable: false };
        return;
      }
      if (err instanceof ApiError) {
        this.banner = { kind: "error", text: err.detail, retryable: false };
        return;
      }
      if (err instanceof NetworkError) {
        this.queue.enqueue(submission);
        this.banner = {
          kind: "offline",
          text: `Offline — score saved locally (${this.queue.size} pending). It will be submitted when the connection returns.`,
          retryable: true,
        };
        return;
      }
      throw err;
    }
  }

  /** Flush the offline queue, then re-sync. Safe to call repeatedly. */
  async retry(): Promise<void> {
    try {
      await this.queue.flush(this.api, this.taskId);
    } catch (err) {
      if (!(err instanceof NetworkError)) throw err;
    }
    if (this.queue.size > 0) {
      this.banner = {
        kind: "offline",
        text: `Still offline — ${this.queue.size} score(s) pending.`,
        retryable: true,
      };
      return;
    }
    await this.refresh();
  }
}

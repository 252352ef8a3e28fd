/** Review session state machine.
 *
 * One in-flight decision at a time; the server stays the arbiter of
 * resolutions (this module never computes outcomes). A decision advances
 * optimistically to the next task; a server conflict (someone else decided
 * the task) rolls forward with a visible notice instead of losing state.
 */

import { ApiClient, ApiError } from "./api.js";
import type { Decision, TaskView } from "./types.js";

export type Phase = "idle" | "loading" | "task" | "empty" | "auth-error";

export interface SessionState {
  phase: Phase;
  task: TaskView | null;
  inFlight: boolean;
  notice: string;
  decidedCount: number;
  lastOutcome: string;
}

export class ReviewSession {
  private state: SessionState = {
    phase: "idle",
    task: null,
    inFlight: false,
    notice: "",
    decidedCount: 0,
    lastOutcome: "",
  };
  private listeners: Array<(state: SessionState) => void> = [];

  constructor(
    private readonly client: ApiClient,
    private readonly reviewer: string,
  ) {}

  snapshot(): SessionState {
    return { ...this.state };
  }

  subscribe(listener: (state: SessionState) => void): void {
    this.listeners.push(listener);
  }

  private update(patch: Partial<SessionState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.snapshot());
  }

  async loadNext(): Promise<void> {
    this.update({ phase: "loading" });
    try {
      const task = await this.client.nextTask(this.reviewer);
      if (task === null) {
        this.update({ phase: "empty", task: null });
      } else {
        this.update({ phase: "task", task });
      }
    } catch (error) {
      this.fail(error);
    }
  }

  /** Submit a decision for the displayed task; no-op while one is in flight. */
  async decide(decision: Decision): Promise<void> {
    const task = this.state.task;
    if (task === null || this.state.inFlight) return;
    this.update({ inFlight: true, notice: "" });
    try {
      const result = await this.client.submitDecision(task.task_id, decision);
      this.update({
        inFlight: false,
        decidedCount: this.state.decidedCount + 1,
        lastOutcome: result.outcome,
        notice: `Recorded ${decision} for ${result.pair_id} (${result.outcome}).`,
      });
      await this.loadNext();
    } catch (error) {
      if (error instanceof ApiError && error.isConflict) {
        // already decided elsewhere: roll forward, keep the user informed
        this.update({
          inFlight: false,
          notice: `Task was already decided (${error.detail}); moving on.`,
        });
        await this.loadNext();
        return;
      }
      this.update({ inFlight: false });
      this.fail(error);
    }
  }

  /** Ask the server again; the queue order is the server's business. */
  async skip(): Promise<void> {
    if (this.state.inFlight) return;
    this.update({ notice: "Skipped; the task stays pending on the server." });
    await this.loadNext();
  }

  private fail(error: unknown): void {
    if (error instanceof ApiError && error.isAuth) {
      this.update({ phase: "auth-error", notice: error.detail });
      return;
    }
    const message = error instanceof Error ? error.message : String(error);
    // network errors are surfaced without destroying the current view
    this.update({ notice: `Request failed: ${message}` });
  }
}

/**
 * Debounced live estimation: every edit schedules a POST /estimate
 * 300 ms out; newer edits supersede in-flight requests (last-write-wins
 * on display).
 */

import { ApiClient } from "./api.js";
import { GraphDoc } from "./document.js";
import { EstimateDoc } from "./state.js";

export const DEBOUNCE_MS = 300;

export interface LiveEstimatorCallbacks {
  onEstimate(estimate: EstimateDoc): void;
  onError(message: string): void;
}

type Scheduler = (fn: () => void, ms: number) => unknown;
type Canceller = (handle: unknown) => void;

export class LiveEstimator {
  private timer: unknown = null;
  private generation = 0;
  private controller: AbortController | null = null;

  constructor(
    private api: ApiClient,
    private callbacks: LiveEstimatorCallbacks,
    private schedule: Scheduler = (fn, ms) => setTimeout(fn, ms),
    private cancel: Canceller = (h) => clearTimeout(h as any)
  ) {}

  /** Call on every graph edit. */
  graphChanged(doc: GraphDoc): void {
    if (this.timer !== null) this.cancel(this.timer);
    const snapshot: GraphDoc = JSON.parse(JSON.stringify(doc));
    this.timer = this.schedule(() => {
      this.timer = null;
      void this.fire(snapshot);
    }, DEBOUNCE_MS);
  }

  private async fire(doc: GraphDoc): Promise<void> {
    this.generation += 1;
    const gen = this.generation;
    this.controller?.abort();
    this.controller = new AbortController();
    try {
      const est = await this.api.estimate(doc, this.controller.signal);
      if (gen === this.generation) this.callbacks.onEstimate(est);
    } catch (err: any) {
      if (err?.name === "AbortError") return;
      if (gen === this.generation) {
        this.callbacks.onError(err?.message ?? String(err));
      }
    }
  }

  dispose(): void {
    if (this.timer !== null) this.cancel(this.timer);
    this.controller?.abort();
  }
}

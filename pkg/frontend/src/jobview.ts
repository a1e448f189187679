import type { ApiClient } from "./api.js";
import type { JobStatusPayload, ParetoPoint, SchemeDoc } from "./types.js";

export interface Selection {
  index: number;
  scheme: SchemeDoc;
  rawScheme: string;
  previewUrl: string;
}

/**
 * State of one submitted job: polling, the front, and the selected
 * solution. All numbers shown in the UI come from API payloads held here.
 */
export class JobView {
  payload: JobStatusPayload | null = null;
  selection: Selection | null = null;
  private stopped = false;

  constructor(
    readonly id: string,
    private client: ApiClient,
    private pollIntervalMs = 1000,
  ) {}

  get points(): ParetoPoint[] {
    return this.payload?.pareto ?? [];
  }

  get midpointIndex(): number | null {
    return this.payload?.midpoint_index ?? null;
  }

  async poll(onUpdate: (payload: JobStatusPayload) => void): Promise<JobStatusPayload> {
    for (;;) {
      const payload = await this.client.jobStatus(this.id);
      this.payload = payload;
      onUpdate(payload);
      if (this.stopped || payload.status === "done" || payload.status === "failed") {
        return payload;
      }
      await new Promise((resolve) => setTimeout(resolve, this.pollIntervalMs));
    }
  }

  stop(): void {
    this.stopped = true;
  }

  /** Select a front point: fetch its scheme (raw text kept) and preview URL. */
  async select(index: number, previewWidth = 480): Promise<Selection> {
    const { doc, raw } = await this.client.scheme(this.id, index);
    this.selection = {
      index,
      scheme: doc,
      rawScheme: raw,
      previewUrl: this.client.renderUrl(this.id, index, previewWidth),
    };
    return this.selection;
  }

  /** Bytes for the export download: exactly the /scheme response body. */
  exportScheme(): string {
    if (!this.selection) {
      throw new Error("no solution selected");
    }
    return this.selection.rawScheme;
  }
}

import type { AnalyzePayload, JobStatusPayload, SchemeDoc } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function fail(res: Response): Promise<never> {
  let detail = res.statusText;
  try {
    const body = await res.json();
    detail = body.detail ?? body.error ?? detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(res.status, detail);
}

/** Thin typed client over the HTTP JSON API; fetch is injectable for tests. */
export class ApiClient {
  constructor(
    private baseUrl = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async health(): Promise<{ status: string }> {
    const res = await this.fetchImpl(`${this.baseUrl}/api/health`);
    if (!res.ok) await fail(res);
    return res.json();
  }

  async analyze(image: File): Promise<AnalyzePayload> {
    const body = new FormData();
    body.append("image", image);
    const res = await this.fetchImpl(`${this.baseUrl}/api/analyze`, { method: "POST", body });
    if (!res.ok) await fail(res);
    return res.json();
  }

  async submitJob(image: File, dem: File, params: string, sidecar?: File): Promise<string> {
    const body = new FormData();
    body.append("image", image);
    body.append("dem", dem);
    if (sidecar) body.append("dem_sidecar", sidecar);
    body.append("params", params);
    const res = await this.fetchImpl(`${this.baseUrl}/api/jobs`, { method: "POST", body });
    if (!res.ok) await fail(res);
    const doc = await res.json();
    return doc.id as string;
  }

  async jobStatus(id: string): Promise<JobStatusPayload> {
    const res = await this.fetchImpl(`${this.baseUrl}/api/jobs/${id}`);
    if (!res.ok) await fail(res);
    return res.json();
  }

  /** Raw response text is preserved so exports stay byte-identical. */
  async scheme(id: string, solution: number): Promise<{ doc: SchemeDoc; raw: string }> {
    const res = await this.fetchImpl(
      `${this.baseUrl}/api/jobs/${id}/scheme?solution=${solution}`,
    );
    if (!res.ok) await fail(res);
    const raw = await res.text();
    return { doc: JSON.parse(raw) as SchemeDoc, raw };
  }

  renderUrl(id: string, solution: number, width?: number): string {
    const base = `${this.baseUrl}/api/jobs/${id}/render?solution=${solution}`;
    return width ? `${base}&width=${width}` : base;
  }
}

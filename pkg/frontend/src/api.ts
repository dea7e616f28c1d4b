// Typed client for the napgraph collection service JSON API.

export interface SheetInfo {
  width: number;
  height: number;
}

export interface SessionMeta {
  id: string;
  sample_names: string[];
  sheet: SheetInfo;
  assessor_ids: string[];
  tablecloth_count: number;
  created: string;
  updated: string;
}

export interface PlacementPayload {
  sample: string;
  x: number;
  y: number;
}

export interface SubmissionPayload {
  assessor_id: string;
  placements: PlacementPayload[];
}

export interface SubmissionResult {
  status: "accepted" | "replaced";
  tablecloth_count: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function readDetail(resp: Response): Promise<string> {
  try {
    const body = await resp.json();
    if (body && typeof body.detail === "string") return body.detail;
  } catch {
    // non-JSON error body; fall through
  }
  return `request failed with status ${resp.status}`;
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async getSession(sessionId: string): Promise<SessionMeta> {
    const resp = await fetch(this.url(`/sessions/${encodeURIComponent(sessionId)}`));
    if (!resp.ok) throw new ApiError(resp.status, await readDetail(resp));
    return (await resp.json()) as SessionMeta;
  }

  async submitTablecloth(
    sessionId: string,
    payload: SubmissionPayload,
  ): Promise<SubmissionResult> {
    const resp = await fetch(
      this.url(`/sessions/${encodeURIComponent(sessionId)}/tablecloths`),
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(payload),
      },
    );
    if (!resp.ok) throw new ApiError(resp.status, await readDetail(resp));
    return (await resp.json()) as SubmissionResult;
  }
}

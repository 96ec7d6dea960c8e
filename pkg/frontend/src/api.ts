// Thin typed client for the annotation service. All depth math lives
// server-side; this only moves JSON and bytes.

import type { AnnotationDoc, SessionInfo, SolveResponse } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly field: string | null = null,
  ) {
    super(message);
  }
}

async function raise(resp: Response): Promise<never> {
  let detail = resp.statusText;
  let field: string | null = null;
  try {
    const body = await resp.json();
    if (typeof body.detail === "string") detail = body.detail;
    if (typeof body.field === "string") field = body.field;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(resp.status, detail, field);
}

export class Client {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async createSession(image: Blob, rows: number, cols: number): Promise<SessionInfo> {
    const form = new FormData();
    form.append("image", image, "upload.png");
    form.append("rows", String(rows));
    form.append("cols", String(cols));
    const resp = await fetch(this.url("/sessions"), { method: "POST", body: form });
    if (!resp.ok) await raise(resp);
    return resp.json();
  }

  async getSession(id: string): Promise<SessionInfo> {
    const resp = await fetch(this.url(`/sessions/${id}`));
    if (!resp.ok) await raise(resp);
    return resp.json();
  }

  async putAnnotations(id: string, doc: AnnotationDoc): Promise<{ revision: number }> {
    const resp = await fetch(this.url(`/sessions/${id}/annotations`), {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(doc),
    });
    if (!resp.ok) await raise(resp);
    return resp.json();
  }

  async solve(id: string, lambda: number, beta: number): Promise<SolveResponse> {
    const resp = await fetch(this.url(`/sessions/${id}/solve`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ lambda, beta }),
    });
    if (!resp.ok) await raise(resp);
    return resp.json();
  }

  /** Absolute preview URL with a cache-busting revision tag. */
  previewUrl(pngUrl: string, revision: number): string {
    return `${this.url(pngUrl)}?rev=${revision}`;
  }

  async fetchDepthStale(id: string): Promise<boolean> {
    const resp = await fetch(this.url(`/sessions/${id}/depth.png`));
    if (!resp.ok) await raise(resp);
    await resp.arrayBuffer();
    return resp.headers.get("X-Stale") === "true";
  }
}

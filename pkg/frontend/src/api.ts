// Thin typed client over the review service HTTP API. The console keeps no
// authoritative state: every answer comes from these calls.

import type { GraphView, QueueItem, Report, Verdict } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

async function errorMessage(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { error?: string };
    if (body && typeof body.error === "string") return body.error;
  } catch {
    // fall through to the status line
  }
  return `HTTP ${response.status}`;
}

export class ApiClient {
  constructor(
    public baseUrl: string,
    public raterId: string,
    private token?: string,
  ) {}

  private headers(): Record<string, string> {
    return this.token ? { Authorization: `Bearer ${this.token}` } : {};
  }

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path, { headers: this.headers() });
    if (!response.ok) throw new ApiError(response.status, await errorMessage(response));
    return (await response.json()) as T;
  }

  /** Next unrated item leased to this rater, or null when the queue is empty. */
  async nextItem(): Promise<QueueItem | null> {
    const response = await fetch(
      `${this.baseUrl}/api/queue/next?rater=${encodeURIComponent(this.raterId)}`,
      { headers: this.headers() },
    );
    if (response.status === 204) return null;
    if (!response.ok) throw new ApiError(response.status, await errorMessage(response));
    return (await response.json()) as QueueItem;
  }

  getItem(itemId: string): Promise<QueueItem> {
    return this.get<QueueItem>(`/api/items/${itemId}`);
  }

  /** Returns true when the verdict was recorded, false on an idempotent replay. */
  async postVerdict(itemId: string, verdict: Verdict): Promise<boolean> {
    const response = await fetch(`${this.baseUrl}/api/items/${itemId}/verdict`, {
      method: "POST",
      headers: { "Content-Type": "application/json", ...this.headers() },
      body: JSON.stringify(verdict),
    });
    if (response.status === 201) return true;
    if (response.status === 200) return false;
    throw new ApiError(response.status, await errorMessage(response));
  }

  report(): Promise<Report> {
    return this.get<Report>("/api/report");
  }

  graph(): Promise<GraphView> {
    return this.get<GraphView>("/api/graph");
  }

  assetUrl(itemId: string, name: string): string {
    return `${this.baseUrl}/api/items/${itemId}/assets/${name}`;
  }
}

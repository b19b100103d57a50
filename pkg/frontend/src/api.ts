// Thin typed client for the session API. Every displayed value in the UI
// originates from one of these responses; the client never computes state.

import type {
  EventPayload,
  NotifyPayload,
  PartitionsPayload,
  SessionMetadata,
  StatePayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body: keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  listSessions(): Promise<{ sessions: SessionMetadata[] }> {
    return this.getJson(`/sessions`);
  }

  async openSession(path: string): Promise<SessionMetadata> {
    return asJson(
      await this.fetchFn(`${this.base}/sessions`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ path }),
      }),
    );
  }

  session(id: string): Promise<SessionMetadata> {
    return this.getJson(`/sessions/${id}`);
  }

  event(id: string, k: number): Promise<EventPayload> {
    return this.getJson(`/sessions/${id}/events/${k}`);
  }

  state(id: string, k: number): Promise<StatePayload> {
    return this.getJson(`/sessions/${id}/state/${k}`);
  }

  partitions(id: string, k: number, range: number): Promise<PartitionsPayload> {
    return this.getJson(`/sessions/${id}/partitions/${k}?range=${range}`);
  }

  async notify(
    id: string,
    kind: "node_clicked" | "transmission_clicked" | "event_changed",
    eventIndex: number,
    nodeId?: number,
  ): Promise<NotifyPayload> {
    return asJson(
      await this.fetchFn(`${this.base}/sessions/${id}/notify`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ kind, event_index: eventIndex, node_id: nodeId ?? null }),
      }),
    );
  }

  screenshotUrl(id: string, k: number, range?: number): string {
    const query = range !== undefined ? `?range=${range}` : "";
    return `${this.base}/sessions/${id}/screenshot/${k}.png${query}`;
  }

  async screenshot(id: string, k: number, range?: number): Promise<Blob> {
    const response = await this.fetchFn(this.screenshotUrl(id, k, range));
    if (!response.ok) throw new ApiError(response.status, response.statusText);
    return response.blob();
  }

  private async getJson<T>(path: string): Promise<T> {
    return asJson<T>(await this.fetchFn(`${this.base}${path}`));
  }
}

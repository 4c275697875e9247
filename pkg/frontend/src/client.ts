/**
 * Service client: plain fetch for requests, a WebSocket live channel with
 * a polling fallback (used automatically where WebSocket is unavailable,
 * e.g. in the node test runner).
 */

import type { ProveResponse, ParseResponse, SessionRequest, SessionView } from "./protocol.js";

export class ServiceClient {
  constructor(readonly baseUrl: string) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) {
      const detail = await res.json().catch(() => ({}));
      throw new ServiceError(res.status, (detail as any).detail ?? res.statusText);
    }
    return res.json() as Promise<T>;
  }

  parse(formula: string): Promise<ParseResponse> {
    return this.post("/parse", { formula });
  }

  prove(formula: string, dialect: string, budget = 3): Promise<ProveResponse> {
    return this.post("/prove", { formula, dialect, budget });
  }

  createSession(req: SessionRequest): Promise<SessionView> {
    return this.post("/sessions", req);
  }

  async getSession(id: string): Promise<SessionView> {
    const res = await fetch(`${this.baseUrl}/sessions/${id}`);
    if (!res.ok) throw new ServiceError(res.status, "no such session");
    return res.json() as Promise<SessionView>;
  }

  postMove(id: string, move: string): Promise<SessionView> {
    return this.post(`/sessions/${id}/moves`, { move });
  }

  /** Open a live channel for the session; falls back to polling when
   * WebSocket is unavailable. Returned channel pushes every new view. */
  live(id: string, onView: (v: SessionView) => void): LiveChannel {
    if (typeof WebSocket !== "undefined") {
      return new WsChannel(this, id, onView);
    }
    return new PollChannel(this, id, onView);
  }
}

export class ServiceError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

export interface LiveChannel {
  sendMove(move: string): Promise<void>;
  close(): void;
}

class WsChannel implements LiveChannel {
  private ws: WebSocket;
  private opened: Promise<void>;

  constructor(client: ServiceClient, id: string, onView: (v: SessionView) => void) {
    const wsBase = client.baseUrl.replace(/^http/, "ws");
    this.ws = new WebSocket(`${wsBase}/sessions/${id}/live`);
    this.opened = new Promise((resolve) => this.ws.addEventListener("open", () => resolve()));
    this.ws.addEventListener("message", (ev) => onView(JSON.parse(ev.data as string)));
  }

  async sendMove(move: string): Promise<void> {
    await this.opened;
    this.ws.send(JSON.stringify({ kind: "move", move }));
  }

  close(): void {
    this.ws.close();
  }
}

class PollChannel implements LiveChannel {
  constructor(private client: ServiceClient, private id: string,
              private onView: (v: SessionView) => void) {}

  async sendMove(move: string): Promise<void> {
    const view = await this.client.postMove(this.id, move);
    this.onView(view);
  }

  close(): void {}
}

// Gateway session: WebSocket event stream with reconnect + backfill, and
// intent submission over HTTP. The read path is stream-only; on reconnect
// the server replays everything after the last seen sequence number, so the
// consumer never misses or double-sees an event.

import { IntentDraft, UiEvent, isUiEvent, validateDraft } from "./types.js";

export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export type FetchLike = (url: string, init?: {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}) => Promise<{ status: number; json(): Promise<unknown> }>;

export interface SessionOptions {
  baseUrl: string; // e.g. "http://127.0.0.1:8000"
  onEvent: (event: UiEvent) => void;
  onStatus?: (status: "connecting" | "connected" | "disconnected") => void;
  socketFactory?: SocketFactory;
  fetchFn?: FetchLike;
  backoffMs?: number[];
  scheduler?: (fn: () => void, ms: number) => unknown;
}

export class SubmissionError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
  }
}

const DEFAULT_BACKOFF = [500, 1000, 2000, 5000];

export class GatewaySession {
  lastSeq = 0;
  attempts = 0;
  connected = false;
  closed = false;
  private socket: SocketLike | null = null;
  private readonly socketFactory: SocketFactory;
  private readonly fetchFn: FetchLike;
  private readonly backoff: number[];
  private readonly schedule: (fn: () => void, ms: number) => unknown;

  constructor(private readonly options: SessionOptions) {
    this.socketFactory =
      options.socketFactory ??
      ((url: string) => new WebSocket(url) as unknown as SocketLike);
    this.fetchFn = options.fetchFn ?? (fetch as unknown as FetchLike);
    this.backoff = options.backoffMs ?? DEFAULT_BACKOFF;
    this.schedule = options.scheduler ?? ((fn, ms) => setTimeout(fn, ms));
  }

  private wsUrl(): string {
    const base = this.options.baseUrl.replace(/^http/, "ws").replace(/\/$/, "");
    return `${base}/events?since_seq=${this.lastSeq}`;
  }

  connect(): void {
    if (this.closed) return;
    this.options.onStatus?.("connecting");
    let socket: SocketLike;
    try {
      socket = this.socketFactory(this.wsUrl());
    } catch {
      this.scheduleReconnect();
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      this.connected = true;
      this.attempts = 0;
      this.options.onStatus?.("connected");
    };
    socket.onmessage = (ev) => {
      let parsed: unknown;
      try {
        parsed = JSON.parse(String(ev.data));
      } catch {
        return; // unparseable frame: skip, the stream itself stays up
      }
      if (!isUiEvent(parsed)) return;
      if (parsed.seq <= this.lastSeq) return; // backfill overlap
      this.lastSeq = parsed.seq;
      this.options.onEvent(parsed);
    };
    const onDown = () => {
      if (this.socket !== socket) return; // stale handler after replace
      this.socket = null;
      const wasConnected = this.connected;
      this.connected = false;
      this.options.onStatus?.("disconnected");
      if (!this.closed) this.scheduleReconnect(wasConnected);
    };
    socket.onclose = onDown;
    socket.onerror = onDown;
  }

  private scheduleReconnect(resetBackoff = false): void {
    if (resetBackoff) this.attempts = 0;
    const delay = this.backoff[Math.min(this.attempts, this.backoff.length - 1)];
    this.attempts += 1;
    this.schedule(() => this.connect(), delay);
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
    this.socket = null;
  }

  async submitIntent(draft: IntentDraft): Promise<string> {
    const problem = validateDraft(draft);
    if (problem) throw new SubmissionError(problem);
    if (!this.connected) {
      throw new SubmissionError("not connected to the gateway; intent not sent");
    }
    const response = await this.fetchFn(`${this.options.baseUrl}/intents`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(draft),
    });
    const body = (await response.json()) as Record<string, unknown>;
    if (response.status !== 202) {
      throw new SubmissionError(
        typeof body.error === "string" ? body.error : `gateway rejected intent (${response.status})`,
        response.status,
      );
    }
    return String(body.intent_id);
  }

  async fetchAgents(): Promise<unknown[]> {
    const response = await this.fetchFn(`${this.options.baseUrl}/agents`);
    const body = (await response.json()) as { agents?: unknown[] };
    return body.agents ?? [];
  }
}

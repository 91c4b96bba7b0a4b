// Test doubles: a scripted fake gateway socket reproducing the /events
// contract (backfill from since_seq, then live), plus helpers to build events.

import { SocketLike } from "./session.js";
import { UiEvent, UiEventType } from "./types.js";

export function makeEvent(
  seq: number,
  type: UiEventType,
  data: Record<string, unknown>,
  timestamp = seq,
): UiEvent {
  return { seq, timestamp, type, agent_id: null, data };
}

export function a2a(seq: number, body: string, sender = "l2-manager",
                    recipient = "pc-agent", kind = "sub_intent"): UiEvent {
  return makeEvent(seq, "a2a_message", {
    sender, recipient, kind, body_text: body, body_structured: null,
    correlation_id: "intent-001",
  });
}

export function kpi(seq: number, t: number, slices: Record<number, number>,
                    ues: Record<number, { tx: number; draw: number }> = {}): UiEvent {
  return makeEvent(
    seq,
    "kpi",
    {
      timestamp_s: t,
      per_slice: Object.entries(slices).map(([sid, bps]) => ({
        slice_id: Number(sid),
        aggregate_throughput_bps: bps,
        prb_utilization_fraction: 0.5,
      })),
      per_ue: Object.entries(ues).map(([uid, v]) => ({
        ue_id: Number(uid),
        throughput_bps: 0,
        snr_db: 10,
        tx_power_dbm: v.tx,
        mcs_index: 5,
        power_draw_mw: v.draw,
      })),
    },
    t,
  );
}

export class FakeSocket implements SocketLike {
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;
  closedByClient = false;

  constructor(readonly url: string) {}

  open(): void {
    this.onopen?.();
  }

  push(event: UiEvent): void {
    this.onmessage?.({ data: JSON.stringify(event) });
  }

  pushRaw(data: string): void {
    this.onmessage?.({ data });
  }

  drop(): void {
    this.onclose?.();
  }

  close(): void {
    this.closedByClient = true;
  }
}

/** Scripted gateway: stores the full event log, serves backfill on connect
 * exactly like the real service (everything after since_seq). */
export class FakeGateway {
  sockets: FakeSocket[] = [];
  log: UiEvent[] = [];
  timers: (() => void)[] = [];

  factory = (url: string): FakeSocket => {
    const socket = new FakeSocket(url);
    this.sockets.push(socket);
    return socket;
  };

  scheduler = (fn: () => void, _ms: number): unknown => {
    this.timers.push(fn);
    return this.timers.length;
  };

  runTimers(): void {
    const pending = this.timers.splice(0);
    pending.forEach((fn) => fn());
  }

  get current(): FakeSocket {
    return this.sockets[this.sockets.length - 1];
  }

  sinceSeq(socket: FakeSocket): number {
    const url = new URL(socket.url);
    return Number(url.searchParams.get("since_seq") ?? "0");
  }

  /** Open the newest socket and replay backfill per the service contract. */
  acceptAndBackfill(): void {
    const socket = this.current;
    const since = this.sinceSeq(socket);
    socket.open();
    for (const event of this.log) {
      if (event.seq > since) socket.push(event);
    }
  }

  append(event: UiEvent): void {
    this.log.push(event);
    this.current?.push(event);
  }
}

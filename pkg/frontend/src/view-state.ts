// Event-sourced view state: one reducer folds gateway events into what the
// four panels render. Events apply in seq order; malformed frames are
// counted and skipped, never thrown.

import {
  A2aPayload,
  DecisionPayload,
  KpiPayload,
  UiEvent,
  ViolationEventPayload,
  isUiEvent,
} from "./types.js";

export interface Point {
  t: number;
  v: number;
}

export interface TimelineEntry {
  seq: number;
  timestamp: number;
  kind: "message" | "decision";
  source: string;
  target?: string;
  messageKind?: string;
  text: string; // body_text / rationale, rendered verbatim
  actions?: string[];
  correlationId?: string;
}

export interface ViolationView {
  key: string;
  sliceId: number;
  requiredBps: number;
  observedBps: number;
  startS: number;
  endS: number;
  resolved: boolean;
}

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface ViewState {
  connection: ConnectionStatus;
  lastSeq: number;
  dropped: number;
  timeline: TimelineEntry[];
  sliceThroughput: Map<number, Point[]>;
  sliceThrottle: Map<number, Point[]>;
  ueTxPower: Map<number, Point[]>;
  uePowerDraw: Map<number, Point[]>;
  ueSnrTarget: Map<number, Point[]>;
  violations: Map<string, ViolationView>;
  lastKpiTimestamp: number | null;
}

export const MAX_POINTS = 900;
export const MAX_TIMELINE = 400;

export function initialState(): ViewState {
  return {
    connection: "connecting",
    lastSeq: 0,
    dropped: 0,
    timeline: [],
    sliceThroughput: new Map(),
    sliceThrottle: new Map(),
    ueTxPower: new Map(),
    uePowerDraw: new Map(),
    ueSnrTarget: new Map(),
    violations: new Map(),
    lastKpiTimestamp: null,
  };
}

function push(series: Map<number, Point[]>, key: number, point: Point): void {
  const existing = series.get(key) ?? [];
  existing.push(point);
  if (existing.length > MAX_POINTS) existing.splice(0, existing.length - MAX_POINTS);
  series.set(key, existing);
}

function pushTimeline(state: ViewState, entry: TimelineEntry): void {
  state.timeline.push(entry);
  if (state.timeline.length > MAX_TIMELINE) {
    state.timeline.splice(0, state.timeline.length - MAX_TIMELINE);
  }
}

function describeAction(a: { kind: string; value: number; ue_id?: number; slice_id?: number }): string {
  if (a.kind === "snr_target") {
    return `SNR target ue ${a.ue_id} -> ${a.value.toFixed(1)} dB`;
  }
  return `throttle slice ${a.slice_id} -> ${(a.value / 1e6).toFixed(1)} Mbit/s`;
}

function applyKpi(state: ViewState, timestamp: number, kpi: KpiPayload): void {
  // chart series mirror the received KPI events one-for-one: no smoothing
  for (const s of kpi.per_slice ?? []) {
    push(state.sliceThroughput, s.slice_id, { t: kpi.timestamp_s, v: s.aggregate_throughput_bps });
  }
  for (const u of kpi.per_ue ?? []) {
    push(state.ueTxPower, u.ue_id, { t: kpi.timestamp_s, v: u.tx_power_dbm });
    push(state.uePowerDraw, u.ue_id, { t: kpi.timestamp_s, v: u.power_draw_mw });
  }
  state.lastKpiTimestamp = kpi.timestamp_s;
}

function applyDecision(state: ViewState, ev: UiEvent, d: DecisionPayload): void {
  for (const action of d.clamped_actions ?? []) {
    if (action.kind === "throttle_limit" && action.slice_id !== undefined) {
      push(state.sliceThrottle, action.slice_id, { t: ev.timestamp, v: action.value });
    }
    if (action.kind === "snr_target" && action.ue_id !== undefined) {
      push(state.ueSnrTarget, action.ue_id, { t: ev.timestamp, v: action.value });
    }
  }
  pushTimeline(state, {
    seq: ev.seq,
    timestamp: ev.timestamp,
    kind: "decision",
    source: d.agent_id ?? ev.agent_id ?? "?",
    text: d.rationale_text ?? "",
    actions: (d.clamped_actions ?? []).map(describeAction),
  });
}

function applyViolation(state: ViewState, payload: ViolationEventPayload): void {
  const r = payload.report;
  const key = `${r.intent_id}/${r.slice_id}`;
  state.violations.set(key, {
    key,
    sliceId: r.slice_id,
    requiredBps: r.required_bps,
    observedBps: r.observed_bps,
    startS: r.start_s,
    endS: r.end_s,
    resolved: payload.event === "resolved" ? true : r.resolved,
  });
}

/** Fold one event frame into the state. Returns true when applied, false
 * when the frame was stale (seq <= lastSeq) or malformed. */
export function applyEvent(state: ViewState, raw: unknown): boolean {
  if (!isUiEvent(raw)) {
    state.dropped += 1;
    return false;
  }
  const ev = raw;
  if (ev.seq <= state.lastSeq) return false; // duplicate from backfill overlap
  state.lastSeq = ev.seq;
  try {
    switch (ev.type) {
      case "a2a_message": {
        const m = ev.data as unknown as A2aPayload;
        if (typeof m.body_text !== "string") throw new Error("missing body_text");
        pushTimeline(state, {
          seq: ev.seq,
          timestamp: ev.timestamp,
          kind: "message",
          source: m.sender,
          target: m.recipient,
          messageKind: m.kind,
          text: m.body_text,
          correlationId: m.correlation_id,
        });
        break;
      }
      case "decision":
        applyDecision(state, ev, ev.data as unknown as DecisionPayload);
        break;
      case "kpi":
        applyKpi(state, ev.timestamp, ev.data as unknown as KpiPayload);
        break;
      case "violation":
        applyViolation(state, ev.data as unknown as ViolationEventPayload);
        break;
      case "lifecycle":
        break; // rendered nowhere, but kept countable
    }
  } catch {
    state.dropped += 1;
    return false;
  }
  return true;
}

export function openViolations(state: ViewState): ViolationView[] {
  return [...state.violations.values()].filter((v) => !v.resolved);
}

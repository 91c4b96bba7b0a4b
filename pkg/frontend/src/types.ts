// Gateway wire types: tagged event frames plus the payload shapes the
// console actually reads. Everything arrives as JSON over /events.

export type UiEventType = "a2a_message" | "decision" | "kpi" | "violation" | "lifecycle";

export interface UiEvent {
  type: UiEventType;
  seq: number;
  timestamp: number;
  agent_id: string | null;
  data: Record<string, unknown>;
}

export interface A2aPayload {
  sender: string;
  recipient: string;
  kind: string;
  body_text: string;
  correlation_id: string;
}

export interface ActionPayload {
  kind: "snr_target" | "throttle_limit";
  value: number;
  ue_id?: number;
  slice_id?: number;
  previous?: number | null;
}

export interface DecisionPayload {
  agent_id: string;
  cycle_index: number;
  rationale_text: string;
  proposed_actions: ActionPayload[];
  clamped_actions: ActionPayload[];
}

export interface KpiPayload {
  timestamp_s: number;
  per_ue: {
    ue_id: number;
    throughput_bps: number;
    snr_db: number;
    tx_power_dbm: number;
    mcs_index: number;
    power_draw_mw: number;
  }[];
  per_slice: {
    slice_id: number;
    aggregate_throughput_bps: number;
    prb_utilization_fraction: number;
  }[];
}

export interface ViolationReportPayload {
  intent_id: string;
  slice_id: number;
  observed_bps: number;
  required_bps: number;
  start_s: number;
  end_s: number;
  resolved: boolean;
}

export interface ViolationEventPayload {
  event: "open" | "resolved";
  report: ViolationReportPayload;
}

export interface GuardrailInfo {
  max_snr_delta_per_cycle_db: number;
  snr_target_bounds_db: [number, number];
  throttle_bounds_bps: [number, number];
}

export interface AgentInfo {
  agent_id: string;
  role: string;
  parent_id: string | null;
  guardrails?: GuardrailInfo;
  active_sub_intent: unknown;
}

export interface IntentDraft {
  body_text: string;
  requirements?: {
    slice_id: number;
    priority?: string;
    min_throughput_bps?: number | null;
    battery_saving?: string;
    spectral_efficiency_focus?: boolean;
  }[];
}

/** Non-empty text is the one hard submission rule; returns an error string
 * for the inline banner, or null when the draft may be posted. */
export function validateDraft(draft: IntentDraft): string | null {
  if (!draft.body_text || draft.body_text.trim().length === 0) {
    return "intent text must be non-empty";
  }
  for (const [i, req] of (draft.requirements ?? []).entries()) {
    if (!Number.isInteger(req.slice_id)) {
      return `requirement ${i}: slice_id must be an integer`;
    }
    if (
      req.min_throughput_bps != null &&
      !(Number.isFinite(req.min_throughput_bps) && req.min_throughput_bps >= 0)
    ) {
      return `requirement ${i}: min_throughput_bps must be a non-negative number`;
    }
  }
  return null;
}

export function isUiEvent(value: unknown): value is UiEvent {
  if (typeof value !== "object" || value === null) return false;
  const v = value as Record<string, unknown>;
  return (
    typeof v.seq === "number" &&
    typeof v.timestamp === "number" &&
    typeof v.type === "string" &&
    ["a2a_message", "decision", "kpi", "violation", "lifecycle"].includes(v.type) &&
    typeof v.data === "object" &&
    v.data !== null
  );
}

import { describe, expect, it } from "vitest";

import { applyEvent, initialState, openViolations } from "./view-state.js";
import { a2a, kpi, makeEvent } from "./testutil.js";

describe("view-state reducer", () => {
  it("renders a2a bodies verbatim in the timeline", () => {
    const state = initialState();
    const text = "Raise the MTC SNR target so it can sustain its 30 Mbit/s minimum.";
    applyEvent(state, a2a(1, text));
    expect(state.timeline).toHaveLength(1);
    expect(state.timeline[0].text).toBe(text);
    expect(state.timeline[0].source).toBe("l2-manager");
    expect(state.timeline[0].target).toBe("pc-agent");
  });

  it("keeps events in seq order and drops duplicates", () => {
    const state = initialState();
    expect(applyEvent(state, a2a(1, "first"))).toBe(true);
    expect(applyEvent(state, a2a(2, "second"))).toBe(true);
    expect(applyEvent(state, a2a(2, "second again"))).toBe(false);
    expect(applyEvent(state, a2a(1, "stale"))).toBe(false);
    expect(state.timeline.map((e) => e.text)).toEqual(["first", "second"]);
    expect(state.lastSeq).toBe(2);
  });

  it("chart series equal the KPI events received, no smoothing", () => {
    const state = initialState();
    const samples: [number, number][] = [
      [1, 40e6],
      [2, 42e6],
      [3, 13e6],
    ];
    let seq = 0;
    for (const [t, bps] of samples) {
      applyEvent(state, kpi(++seq, t, { 0: bps }, { 2: { tx: 15 + t, draw: 2100 } }));
    }
    expect(state.sliceThroughput.get(0)).toEqual(
      samples.map(([t, v]) => ({ t, v })),
    );
    expect(state.ueTxPower.get(2)).toEqual(samples.map(([t]) => ({ t, v: 15 + t })));
    expect(state.uePowerDraw.get(2)).toEqual(samples.map(([t]) => ({ t, v: 2100 })));
  });

  it("decision events feed throttle and target overlays plus the timeline", () => {
    const state = initialState();
    applyEvent(
      state,
      makeEvent(5, "decision", {
        agent_id: "ul-ra-agent",
        cycle_index: 9,
        rationale_text: "MTC below required minimum; throttling competing slices",
        proposed_actions: [{ kind: "throttle_limit", slice_id: 0, value: 8e7 }],
        clamped_actions: [{ kind: "throttle_limit", slice_id: 0, value: 8e7, previous: 1e8 }],
      }),
    );
    expect(state.sliceThrottle.get(0)).toEqual([{ t: 5, v: 8e7 }]);
    expect(state.timeline[0].kind).toBe("decision");
    expect(state.timeline[0].text).toContain("throttling competing slices");
    expect(state.timeline[0].actions?.[0]).toContain("80.0 Mbit/s");
  });

  it("violation banner persists until the resolved event", () => {
    const state = initialState();
    const report = {
      intent_id: "intent-2",
      slice_id: 1,
      observed_bps: 25e6,
      required_bps: 30e6,
      start_s: 91,
      end_s: 93,
      resolved: false,
    };
    applyEvent(state, makeEvent(7, "violation", { event: "open", report }));
    expect(openViolations(state)).toHaveLength(1);
    applyEvent(state, makeEvent(8, "kpi", { timestamp_s: 94, per_slice: [], per_ue: [] }));
    expect(openViolations(state)).toHaveLength(1);
    applyEvent(
      state,
      makeEvent(9, "violation", {
        event: "resolved",
        report: { ...report, end_s: 98, resolved: true },
      }),
    );
    expect(openViolations(state)).toHaveLength(0);
    expect(state.violations.get("intent-2/1")?.resolved).toBe(true);
  });

  it("malformed events are skipped and counted, never thrown", () => {
    const state = initialState();
    expect(applyEvent(state, { nothing: true })).toBe(false);
    expect(applyEvent(state, "garbage")).toBe(false);
    expect(applyEvent(state, makeEvent(1, "a2a_message", { no_body: 1 }))).toBe(false);
    expect(state.dropped).toBe(3);
    expect(applyEvent(state, a2a(2, "still alive"))).toBe(true);
  });

  it("bounds series and timeline growth", () => {
    const state = initialState();
    for (let i = 1; i <= 1200; i++) {
      applyEvent(state, kpi(i, i, { 0: 1e6 * i }));
    }
    expect(state.sliceThroughput.get(0)!.length).toBeLessThanOrEqual(900);
    const tail = state.sliceThroughput.get(0)!.at(-1)!;
    expect(tail.v).toBe(1200e6);
  });
});

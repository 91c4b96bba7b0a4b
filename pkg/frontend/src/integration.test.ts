// End-to-end console test against a real gateway process: intent submission,
// decomposition in the timeline, throttle overlay movement, and a gateway
// restart with no duplicate or missing events after reconnect.

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import WebSocket from "ws";

import { GatewaySession, SocketLike } from "./session.js";
import { UiEvent } from "./types.js";
import { applyEvent, initialState } from "./view-state.js";

const EMERGENCY_TEXT =
  "There is a life emergency: every MTC sensor is now high priority and " +
  "needs at least 30 Mbit/s of uplink throughput.";

const PKG_ROOT = resolve(__dirname, "..", "..");
const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

function scenarioConfig(): Record<string, unknown> {
  return {
    seed: 11,
    duration_s: 100000.0,
    time_compression: 400.0,
    kpi_period_s: 1.0,
    cell: {},
    slices: [
      { slice_id: 0, name: "FWA" },
      { slice_id: 1, name: "MTC" },
    ],
    ues: [
      { ue_id: 0, slice_id: 0, tx_power_dbm: 17.0, snr_target_db: 15.0,
        path_gain_db: -2.0, offered_load_bps: 4e7, walk_step_db: 0.0 },
      { ue_id: 1, slice_id: 0, tx_power_dbm: 17.0, snr_target_db: 15.0,
        path_gain_db: -2.0, offered_load_bps: 4e7, walk_step_db: 0.0 },
      { ue_id: 2, slice_id: 1, tx_power_dbm: 15.0, snr_target_db: 15.0,
        path_gain_db: 0.0, offered_load_bps: 4e7, walk_step_db: 0.0 },
    ],
    phases: [
      { start_s: 0.0, name: "normal",
        body_text: "Maximize the overall uplink throughput for every user." },
    ],
  };
}

function wsFactory(url: string): SocketLike {
  const ws = new WebSocket(url);
  const like: SocketLike = {
    onopen: null,
    onmessage: null,
    onclose: null,
    onerror: null,
    close: () => ws.close(),
  };
  ws.on("open", () => like.onopen?.());
  ws.on("message", (data) => like.onmessage?.({ data: data.toString() }));
  ws.on("close", () => like.onclose?.());
  ws.on("error", () => like.onerror?.());
  return like;
}

async function waitFor(predicate: () => boolean, ms: number, what: string): Promise<void> {
  const deadline = Date.now() + ms;
  while (Date.now() < deadline) {
    if (predicate()) return;
    await new Promise((r) => setTimeout(r, 25));
  }
  throw new Error(`timed out waiting for ${what}`);
}

async function gatewayUp(): Promise<boolean> {
  try {
    const res = await fetch(`${BASE}/agents`);
    return res.status === 200;
  } catch {
    return false;
  }
}

describe("console against a live gateway", () => {
  let out: string;
  let configPath: string;
  let proc: ChildProcess | null = null;

  function startGateway(): ChildProcess {
    const child = spawn(
      "python3",
      ["-m", "ranloop.gateway.cli", "serve", "--config", configPath,
       "--out", out, "--listen", `127.0.0.1:${PORT}`],
      { cwd: PKG_ROOT, stdio: "ignore" },
    );
    return child;
  }

  beforeAll(async () => {
    out = mkdtempSync(join(tmpdir(), "console-it-"));
    configPath = join(out, "scenario.json");
    writeFileSync(configPath, JSON.stringify(scenarioConfig()));
    proc = startGateway();
    await waitFor(() => false, 400, "grace").catch(() => {});
    const deadline = Date.now() + 20000;
    while (Date.now() < deadline && !(await gatewayUp())) {
      await new Promise((r) => setTimeout(r, 200));
    }
    if (!(await gatewayUp())) throw new Error("gateway failed to start");
  }, 30000);

  afterAll(() => {
    proc?.kill();
  });

  it("shows the decomposition within 2 s and moves the throttle overlay; "
     + "survives a gateway restart without duplicate or missing events", async () => {
    const state = initialState();
    const received: UiEvent[] = [];
    const session = new GatewaySession({
      baseUrl: BASE,
      onEvent: (event) => {
        received.push(event);
        applyEvent(state, event);
      },
      onStatus: (s) => {
        state.connection = s;
      },
      socketFactory: wsFactory,
      backoffMs: [200, 400, 800],
    });
    session.connect();
    await waitFor(() => state.connection === "connected", 10000, "connection");

    const intentId = await session.submitIntent({ body_text: EMERGENCY_TEXT });
    expect(intentId).toMatch(/^intent-/);

    // the L2 decomposition must land in the timeline within 2 s of wall clock
    const submitted = Date.now();
    await waitFor(
      () =>
        state.timeline.some(
          (e) =>
            e.kind === "message" &&
            e.messageKind === "sub_intent" &&
            e.correlationId === intentId,
        ),
      2000,
      "decomposition in timeline",
    );
    expect(Date.now() - submitted).toBeLessThan(2000);
    const subIntents = state.timeline.filter(
      (e) => e.messageKind === "sub_intent" && e.correlationId === intentId,
    );
    expect(subIntents.map((e) => e.target).sort()).toEqual(["pc-agent", "ul-ra-agent"]);

    // throughput chart gains a throttle overlay once the RA agent reacts
    await waitFor(
      () => (state.sliceThrottle.get(0) ?? []).some((p) => p.v < 1e8),
      15000,
      "FWA throttle reduction on the chart",
    );

    // restart the gateway; the session must resume with no dups and no gaps
    const beforeRestart = received.length;
    proc?.kill();
    await waitFor(() => state.connection === "disconnected", 10000, "disconnect");
    proc = startGateway();
    await waitFor(() => state.connection === "connected", 20000, "reconnect");
    await waitFor(() => received.length > beforeRestart + 3, 15000, "fresh events");
    session.close();

    const seqs = received.map((e) => e.seq);
    const unique = new Set(seqs);
    expect(unique.size).toBe(seqs.length); // no duplicates
    const sorted = [...seqs].sort((a, b) => a - b);
    expect(seqs).toEqual(sorted); // delivered in order
    // no missing events: the stream carries every lake record, so the seq
    // range we observed must be contiguous across the restart
    for (let i = 1; i < sorted.length; i++) {
      expect(sorted[i]).toBe(sorted[i - 1] + 1);
    }
  }, 90000);
});

import { describe, expect, it } from "vitest";

import { GatewaySession, SubmissionError } from "./session.js";
import { UiEvent, validateDraft } from "./types.js";
import { FakeGateway, a2a, kpi } from "./testutil.js";

function makeSession(gateway: FakeGateway, received: UiEvent[], statuses: string[] = []) {
  return new GatewaySession({
    baseUrl: "http://gw.test",
    onEvent: (e) => received.push(e),
    onStatus: (s) => statuses.push(s),
    socketFactory: gateway.factory,
    scheduler: gateway.scheduler,
    backoffMs: [10, 20, 40],
    fetchFn: async () => ({ status: 500, json: async () => ({}) }),
  });
}

describe("gateway session", () => {
  it("streams events in order after connect", () => {
    const gateway = new FakeGateway();
    const received: UiEvent[] = [];
    const statuses: string[] = [];
    const session = makeSession(gateway, received, statuses);
    session.connect();
    gateway.acceptAndBackfill();
    gateway.append(a2a(1, "hello"));
    gateway.append(kpi(2, 1, { 0: 1e6 }));
    expect(received.map((e) => e.seq)).toEqual([1, 2]);
    expect(statuses).toEqual(["connecting", "connected"]);
  });

  it("requests backfill from the last seen seq on reconnect and dedupes", () => {
    const gateway = new FakeGateway();
    const received: UiEvent[] = [];
    const session = makeSession(gateway, received);
    session.connect();
    gateway.acceptAndBackfill();
    gateway.append(a2a(1, "one"));
    gateway.append(a2a(2, "two"));

    gateway.current.drop(); // connection lost
    gateway.log.push(a2a(3, "missed while down"));
    gateway.runTimers(); // reconnect fires
    expect(gateway.sinceSeq(gateway.current)).toBe(2);
    gateway.acceptAndBackfill(); // replays only seq 3
    gateway.append(a2a(4, "live again"));

    expect(received.map((e) => e.seq)).toEqual([1, 2, 3, 4]);
  });

  it("drops overlapping backfill events after reconnect", () => {
    const gateway = new FakeGateway();
    const received: UiEvent[] = [];
    const session = makeSession(gateway, received);
    session.connect();
    gateway.acceptAndBackfill();
    gateway.append(a2a(1, "one"));
    gateway.current.drop();
    gateway.runTimers();
    const socket = gateway.current;
    socket.open();
    // a sloppy server replays everything; the client must still dedupe
    socket.push(a2a(1, "one"));
    socket.push(a2a(2, "two"));
    expect(received.map((e) => e.seq)).toEqual([1, 2]);
  });

  it("backs off with the configured schedule and recovers", () => {
    const gateway = new FakeGateway();
    const session = makeSession(gateway, []);
    session.connect();
    gateway.current.drop(); // never opened: immediate failure
    expect(session.attempts).toBe(1);
    gateway.runTimers();
    gateway.current.drop();
    expect(session.attempts).toBe(2);
    gateway.runTimers();
    gateway.acceptAndBackfill();
    expect(session.connected).toBe(true);
    expect(session.attempts).toBe(0); // reset after a successful open
  });

  it("ignores unparseable frames without killing the stream", () => {
    const gateway = new FakeGateway();
    const received: UiEvent[] = [];
    const session = makeSession(gateway, received);
    session.connect();
    gateway.acceptAndBackfill();
    gateway.current.pushRaw("{nope");
    gateway.append(a2a(1, "fine"));
    expect(received).toHaveLength(1);
  });

  it("close() stops reconnecting", () => {
    const gateway = new FakeGateway();
    const session = makeSession(gateway, []);
    session.connect();
    gateway.acceptAndBackfill();
    session.close();
    expect(gateway.current.closedByClient).toBe(true);
    gateway.current.drop();
    gateway.runTimers();
    expect(gateway.sockets).toHaveLength(1); // no new socket
  });
});

describe("intent submission", () => {
  it("posts the draft and returns the intent id", async () => {
    const gateway = new FakeGateway();
    const calls: { url: string; body: string }[] = [];
    const session = new GatewaySession({
      baseUrl: "http://gw.test",
      onEvent: () => {},
      socketFactory: gateway.factory,
      scheduler: gateway.scheduler,
      fetchFn: async (url, init) => {
        calls.push({ url, body: init?.body ?? "" });
        return { status: 202, json: async () => ({ intent_id: "intent-007" }) };
      },
    });
    session.connect();
    gateway.acceptAndBackfill();
    const id = await session.submitIntent({ body_text: "protect MTC" });
    expect(id).toBe("intent-007");
    expect(calls[0].url).toBe("http://gw.test/intents");
    expect(JSON.parse(calls[0].body).body_text).toBe("protect MTC");
  });

  it("refuses empty drafts before any network call", async () => {
    const gateway = new FakeGateway();
    const session = makeSession(gateway, []);
    session.connect();
    gateway.acceptAndBackfill();
    await expect(session.submitIntent({ body_text: "  " })).rejects.toThrow(/non-empty/);
  });

  it("refuses to submit while disconnected", async () => {
    const gateway = new FakeGateway();
    const session = makeSession(gateway, []);
    session.connect(); // never opened
    await expect(session.submitIntent({ body_text: "x" })).rejects.toThrow(/not connected/);
  });

  it("surfaces gateway 400s as inline errors", async () => {
    const gateway = new FakeGateway();
    const session = new GatewaySession({
      baseUrl: "http://gw.test",
      onEvent: () => {},
      socketFactory: gateway.factory,
      scheduler: gateway.scheduler,
      fetchFn: async () => ({
        status: 400,
        json: async () => ({ error: "field 'body_text': required non-empty string" }),
      }),
    });
    session.connect();
    gateway.acceptAndBackfill();
    const err = await session.submitIntent({ body_text: "x" }).catch((e) => e);
    expect(err).toBeInstanceOf(SubmissionError);
    expect(err.status).toBe(400);
    expect(err.message).toContain("body_text");
  });
});

describe("draft validation", () => {
  it("accepts plain text and structured sugar", () => {
    expect(validateDraft({ body_text: "maximize throughput" })).toBeNull();
    expect(
      validateDraft({
        body_text: "protect MTC",
        requirements: [{ slice_id: 1, priority: "high", min_throughput_bps: 30e6 }],
      }),
    ).toBeNull();
  });

  it("rejects empty text and malformed requirements", () => {
    expect(validateDraft({ body_text: "" })).toMatch(/non-empty/);
    expect(
      validateDraft({ body_text: "x", requirements: [{ slice_id: 1.5 }] }),
    ).toMatch(/slice_id/);
    expect(
      validateDraft({
        body_text: "x",
        requirements: [{ slice_id: 1, min_throughput_bps: -5 }],
      }),
    ).toMatch(/min_throughput_bps/);
  });
});

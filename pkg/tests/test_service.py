import json
import time

import pytest
from fastapi.testclient import TestClient

from ranloop.gateway.scenario import load_scenario
from ranloop.gateway.service import ServeRuntime, make_app
from test_scenario import mini_config


EMERGENCY_TEXT = (
    "There is a life emergency: every MTC sensor is now high priority and "
    "needs at least 30 Mbit/s of uplink throughput."
)


@pytest.fixture
def client(tmp_path):
    raw = mini_config(duration=600.0)  # long enough to stay live for the test
    raw["time_compression"] = 2000.0
    raw["phases"] = [raw["phases"][0]]  # just the normal phase; tests inject more
    config = load_scenario(raw)
    runtime = ServeRuntime(config, tmp_path / "serve")
    app = make_app(runtime)
    with TestClient(app) as c:
        c.runtime = runtime
        yield c


def _wait_for(predicate, timeout=10.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        if predicate():
            return True
        time.sleep(0.02)
    return False


def test_post_intent_returns_202_and_decomposition_flows(client):
    response = client.post("/intents", json={"body_text": EMERGENCY_TEXT})
    assert response.status_code == 202
    intent_id = response.json()["intent_id"]
    assert intent_id

    lake = client.runtime.runtime.lake
    assert _wait_for(
        lambda: any(
            r.kind == "message"
            and r.payload["kind"] == "sub_intent"
            and r.payload["correlation_id"] == intent_id
            for r in lake.iter_records()
        )
    ), "decomposition never reached the lake"


def test_malformed_intent_bodies_are_400(client):
    assert client.post("/intents", content=b"{nope").status_code == 400
    assert client.post("/intents", json={"wrong": 1}).status_code == 400
    assert client.post("/intents", json={"body_text": "  "}).status_code == 400
    bad_req = {"body_text": "x", "requirements": [{"slice_id": 0, "priority": "party"}]}
    response = client.post("/intents", json=bad_req)
    assert response.status_code == 400
    assert "requirements[0]" in response.json()["error"]


def test_unknown_route_is_404(client):
    assert client.get("/does-not-exist").status_code == 404


def test_kpis_window_limits_results(client):
    assert _wait_for(
        lambda: len(client.get("/kpis?window=3").json()["snapshots"]) > 0
    )
    snaps = client.get("/kpis?window=3").json()["snapshots"]
    assert 1 <= len(snaps) <= 3
    assert {"timestamp_s", "per_ue", "per_slice"} <= set(snaps[0])


def test_agents_registry_lists_hierarchy(client):
    agents = client.get("/agents").json()["agents"]
    ids = {a["agent_id"] for a in agents}
    assert {"ran-manager", "l2-manager", "pc-agent", "ul-ra-agent"} <= ids
    l2 = next(a for a in agents if a["agent_id"] == "l2-manager")
    assert l2["parent_id"] == "ran-manager"


def test_event_stream_is_ordered_and_complete(client):
    client.post("/intents", json={"body_text": EMERGENCY_TEXT})
    events = []
    with client.websocket_connect("/events?since_seq=0") as ws:
        for _ in range(40):
            events.append(json.loads(ws.receive_text()))
    seqs = [e["seq"] for e in events]
    assert seqs == sorted(seqs)
    assert len(set(seqs)) == len(seqs), "duplicate events on the stream"
    types = {e["type"] for e in events}
    assert "a2a_message" in types


def test_reconnect_with_since_seq_yields_no_duplicates_or_gaps(client):
    client.post("/intents", json={"body_text": EMERGENCY_TEXT})
    first_batch = []
    with client.websocket_connect("/events?since_seq=0") as ws:
        for _ in range(15):
            first_batch.append(json.loads(ws.receive_text()))
    last_seen = first_batch[-1]["seq"]

    second_batch = []
    with client.websocket_connect(f"/events?since_seq={last_seen}") as ws:
        for _ in range(15):
            second_batch.append(json.loads(ws.receive_text()))

    firsts = {e["seq"] for e in first_batch}
    seconds = [e["seq"] for e in second_batch]
    assert all(seq > last_seen for seq in seconds), "duplicate after reconnect"
    assert seconds == sorted(seconds)
    # no gap: the union must cover every lake seq in [min, max] for streamed kinds
    lake = client.runtime.runtime.lake
    lake_seqs = {
        r.seq for r in lake.iter_records()
        if firsts and min(firsts) <= r.seq <= max(seconds, default=last_seen)
    }
    assert lake_seqs <= (firsts | set(seconds))


def test_live_events_match_lake_records_exactly_once(client):
    client.post("/intents", json={"body_text": EMERGENCY_TEXT})
    events = []
    with client.websocket_connect("/events?since_seq=0") as ws:
        for _ in range(60):
            events.append(json.loads(ws.receive_text()))
    max_seq = max(e["seq"] for e in events)
    lake = client.runtime.runtime.lake
    watched = {"message", "decision", "violation"}
    lake_watched = [r for r in lake.iter_records()
                    if r.kind in watched and r.seq <= max_seq]
    got = [e["seq"] for e in events
           if e["type"] in ("a2a_message", "decision", "violation")]
    assert sorted(got) == [r.seq for r in lake_watched]

"""Operator-facing service: intent submission, KPI queries, live event stream.

The scenario driver runs in a background thread paced by time_compression;
HTTP handlers touch it only through thread-safe queues and the data lake.
Every lake append fans out to WebSocket subscribers as a tagged JSON event,
and reconnecting clients resume from their last seen sequence number without
duplicates.
"""

from __future__ import annotations

import asyncio
import json
import threading
import time
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, Query, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..agents.types import SliceRequirement
from ..datalake.store import LogRecord
from .scenario import ScenarioConfig, ScenarioRuntime

EVENT_TYPES = {
    "message": "a2a_message",
    "decision": "decision",
    "kpi": "kpi",
    "violation": "violation",
    "lifecycle": "lifecycle",
}


def record_to_event(record: LogRecord) -> dict:
    return {
        "type": EVENT_TYPES.get(record.kind, record.kind),
        "seq": record.seq,
        "timestamp": record.timestamp_s,
        "agent_id": record.agent_id,
        "data": record.payload,
    }


class EventHub:
    """Thread-to-asyncio fan-out of lake records."""

    def __init__(self):
        self._lock = threading.Lock()
        self._subscribers: list[tuple[asyncio.Queue, asyncio.AbstractEventLoop]] = []

    def publish(self, record: LogRecord) -> None:
        event = record_to_event(record)
        with self._lock:
            targets = list(self._subscribers)
        for queue, loop in targets:
            loop.call_soon_threadsafe(queue.put_nowait, event)

    def subscribe(self) -> asyncio.Queue:
        queue: asyncio.Queue = asyncio.Queue()
        with self._lock:
            self._subscribers.append((queue, asyncio.get_running_loop()))
        return queue

    def unsubscribe(self, queue: asyncio.Queue) -> None:
        with self._lock:
            self._subscribers = [(q, l) for q, l in self._subscribers if q is not queue]


class ServeRuntime:
    """Background driver: paces the virtual clock against the wall clock."""

    def __init__(self, config: ScenarioConfig, out_dir: str | Path):
        self.runtime = ScenarioRuntime(config, out_dir)
        self.hub = EventHub()
        self.runtime.lake.add_observer(self.hub.publish)
        self._pending: list = []
        self._pending_lock = threading.Lock()
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    # -- intent ingress ----------------------------------------------------------

    def submit_intent(self, body_text: str, requirements=(), domain=None) -> str:
        intent = self.runtime.build_intent(body_text, requirements, domain=domain)
        with self._pending_lock:
            self._pending.append(intent)
        return intent.intent_id

    def _drain_pending(self) -> None:
        with self._pending_lock:
            pending, self._pending = self._pending, []
        for intent in pending:
            self.runtime.inject_intent(intent)

    # -- driver thread -------------------------------------------------------------

    def _loop(self) -> None:
        runtime = self.runtime
        period = runtime.config.kpi_period_s / runtime.config.time_compression
        runtime.start()
        while not self._stop.is_set():
            started = time.monotonic()
            self._drain_pending()
            runtime.advance_period()
            remainder = period - (time.monotonic() - started)
            if remainder > 0:
                self._stop.wait(remainder)

    def start(self) -> None:
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5)
        self.runtime.close()


def make_app(serve_runtime: ServeRuntime, static_dir: str | Path | None = None) -> FastAPI:
    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        serve_runtime.start()
        yield
        serve_runtime.stop()

    app = FastAPI(title="uplink intent console gateway", lifespan=lifespan)
    app.state.runtime = serve_runtime

    @app.post("/intents")
    async def post_intent(request: Request):
        try:
            body = await request.json()
        except Exception:
            return JSONResponse({"error": "body must be valid JSON"}, status_code=400)
        if not isinstance(body, dict):
            return JSONResponse({"error": "body must be an object"}, status_code=400)
        text = body.get("body_text")
        if not isinstance(text, str) or not text.strip():
            return JSONResponse(
                {"error": "field 'body_text': required non-empty string"}, status_code=400
            )
        requirements = []
        for i, raw in enumerate(body.get("requirements", []) or []):
            try:
                requirements.append(SliceRequirement.from_dict(raw))
            except (KeyError, TypeError, ValueError) as exc:
                return JSONResponse(
                    {"error": f"field 'requirements[{i}]': {exc}"}, status_code=400
                )
        intent_id = serve_runtime.submit_intent(
            text.strip(), requirements, domain=body.get("domain")
        )
        return JSONResponse({"intent_id": intent_id}, status_code=202)

    @app.get("/kpis")
    async def get_kpis(window: int = Query(default=10, ge=1, le=1000)):
        records = [r for r in serve_runtime.runtime.lake.iter_records() if r.kind == "kpi"]
        return {
            "snapshots": [r.payload for r in records[-window:]],
        }

    @app.get("/agents")
    async def get_agents():
        return {
            "agents": [agent.describe() for agent in serve_runtime.runtime.agents],
        }

    @app.websocket("/events")
    async def events(ws: WebSocket, since_seq: int = Query(default=0, ge=0)):
        await ws.accept()
        hub = serve_runtime.hub
        queue = hub.subscribe()  # subscribe first: no gap between backfill and live
        try:
            backlog = serve_runtime.runtime.lake.query_since_seq(since_seq)
            last_seq = since_seq
            for record in backlog:
                await ws.send_text(json.dumps(record_to_event(record), sort_keys=True))
                last_seq = max(last_seq, record.seq)
            while True:
                event = await queue.get()
                if event["seq"] <= last_seq:
                    continue  # already delivered via backfill
                last_seq = event["seq"]
                await ws.send_text(json.dumps(event, sort_keys=True))
        except WebSocketDisconnect:
            pass
        finally:
            hub.unsubscribe(queue)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="console")

    return app

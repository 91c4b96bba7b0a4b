"""In-process agent message bus with mirroring and dead-lettering.

Delivery is FIFO per recipient (hence per sender/recipient pair), safe for
concurrent senders. Every accepted message is mirrored to the registered
sinks (data lake, gateway event stream) at send time. Messages to an agent
that never subscribes are dead-lettered once the configured timeout passes.
"""

from __future__ import annotations

import queue
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Callable

MESSAGE_KINDS = ("intent", "sub_intent", "context_report", "constraint_report", "ack")


@dataclass(frozen=True)
class A2aMessage:
    sender: str
    recipient: str
    kind: str
    body_text: str
    body_structured: dict | None = None
    correlation_id: str = ""

    def __post_init__(self):
        if self.kind not in MESSAGE_KINDS:
            raise ValueError(f"unknown message kind {self.kind!r}")
        if not self.body_text:
            raise ValueError("body_text must be non-empty")

    def to_dict(self) -> dict:
        return {
            "sender": self.sender,
            "recipient": self.recipient,
            "kind": self.kind,
            "body_text": self.body_text,
            "body_structured": self.body_structured,
            "correlation_id": self.correlation_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "A2aMessage":
        return cls(
            sender=d["sender"],
            recipient=d["recipient"],
            kind=d["kind"],
            body_text=d["body_text"],
            body_structured=d.get("body_structured"),
            correlation_id=d.get("correlation_id", ""),
        )


@dataclass(frozen=True)
class DeadLetter:
    message: A2aMessage
    reason: str
    deadline_s: float


@dataclass
class Subscription:
    agent_id: str
    _queue: "queue.SimpleQueue[A2aMessage]" = field(default_factory=queue.SimpleQueue)

    def drain(self) -> list[A2aMessage]:
        """Non-blocking: everything queued so far, in delivery order."""
        out = []
        while True:
            try:
                out.append(self._queue.get_nowait())
            except queue.Empty:
                return out

    def get(self, timeout: float | None = None) -> A2aMessage:
        return self._queue.get(timeout=timeout)


class MessageBus:
    def __init__(
        self,
        clock: Callable[[], float] = time.monotonic,
        dead_letter_timeout_s: float = 5.0,
        mirrors: list[Callable[[A2aMessage], Any]] | None = None,
        dead_letter_sink: Callable[[DeadLetter], Any] | None = None,
    ):
        self._clock = clock
        self._timeout = dead_letter_timeout_s
        self._mirrors = list(mirrors or [])
        self._dead_letter_sink = dead_letter_sink
        self._lock = threading.Lock()
        self._subs: dict[str, Subscription] = {}
        self._pending: list[tuple[float, A2aMessage]] = []  # (deadline, msg)
        self.dead_letters: list[DeadLetter] = []

    def add_mirror(self, sink: Callable[[A2aMessage], Any]) -> None:
        self._mirrors.append(sink)

    def subscribe(self, agent_id: str) -> Subscription:
        with self._lock:
            if agent_id in self._subs:
                return self._subs[agent_id]
            sub = Subscription(agent_id)
            self._subs[agent_id] = sub
            # flush anything queued for this agent, preserving send order
            still_pending = []
            for deadline, msg in self._pending:
                if msg.recipient == agent_id:
                    sub._queue.put(msg)
                else:
                    still_pending.append((deadline, msg))
            self._pending = still_pending
            return sub

    def send_message(self, msg: A2aMessage) -> None:
        for sink in self._mirrors:
            sink(msg)
        with self._lock:
            sub = self._subs.get(msg.recipient)
            if sub is not None:
                sub._queue.put(msg)
            else:
                self._pending.append((self._clock() + self._timeout, msg))

    def expire_pending(self) -> list[DeadLetter]:
        """Dead-letter pending messages whose wait exceeded the timeout.

        Driven by the owner of the clock (virtual time in headless runs,
        wall time in serve mode)."""
        now = self._clock()
        expired: list[DeadLetter] = []
        with self._lock:
            keep = []
            for deadline, msg in self._pending:
                if now >= deadline:
                    expired.append(
                        DeadLetter(message=msg, reason="recipient never subscribed",
                                   deadline_s=deadline)
                    )
                else:
                    keep.append((deadline, msg))
            self._pending = keep
            self.dead_letters.extend(expired)
        for letter in expired:
            if self._dead_letter_sink is not None:
                self._dead_letter_sink(letter)
        return expired

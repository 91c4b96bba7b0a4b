"""Agent plumbing shared by every role: inbox, cycles, lake logging."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable

from ..fabric.bus import A2aMessage, MessageBus
from .types import ContextReport, GuardrailConfig, KpiWindow


@dataclass(frozen=True)
class SliceInfo:
    slice_id: int
    name: str
    ue_ids: tuple[int, ...]


@dataclass
class AgentConfig:
    agent_id: str
    role: str  # "manager" | "l2" | "pc" | "ra" | "dl"
    parent_id: str | None = None
    cycle_period_s: float = 1.0
    heartbeat_s: float = 10.0
    guardrails: GuardrailConfig = field(default_factory=GuardrailConfig)
    context_text: str = ""
    max_renegotiations: int = 3

    def to_dict(self) -> dict:
        return {
            "agent_id": self.agent_id,
            "role": self.role,
            "parent_id": self.parent_id,
            "cycle_period_s": self.cycle_period_s,
            "heartbeat_s": self.heartbeat_s,
            "guardrails": self.guardrails.to_dict(),
            "context_text": self.context_text,
            "max_renegotiations": self.max_renegotiations,
        }


def window_digest(window: KpiWindow) -> str:
    payload = "|".join(
        f"{s.timestamp_s:.6f}:" + ",".join(
            f"{p.slice_id}={p.aggregate_throughput_bps:.3f}" for p in s.per_slice
        )
        for s in window.samples
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


class BaseAgent:
    def __init__(
        self,
        config: AgentConfig,
        bus: MessageBus,
        lake_append: Callable[..., object] | None = None,
        clock: Callable[[], float] = lambda: 0.0,
    ):
        self.config = config
        self.agent_id = config.agent_id
        self.bus = bus
        self.clock = clock
        self._lake_append = lake_append
        self.subscription = bus.subscribe(config.agent_id)
        self._next_cycle_s = 0.0
        self._next_heartbeat_s = config.heartbeat_s

    # -- messaging ------------------------------------------------------------

    def send(self, recipient: str, kind: str, body_text: str,
             body_structured: dict | None = None, correlation_id: str = "") -> None:
        self.bus.send_message(
            A2aMessage(
                sender=self.agent_id,
                recipient=recipient,
                kind=kind,
                body_text=body_text,
                body_structured=body_structured,
                correlation_id=correlation_id,
            )
        )

    def log(self, kind: str, payload: dict) -> None:
        if self._lake_append is not None:
            self._lake_append(kind, payload, self.clock(), self.agent_id)

    # -- loop -----------------------------------------------------------------

    def run_due(self, now: float) -> None:
        """Cooperative step: drain the inbox, then run cycles that came due."""
        for msg in self.subscription.drain():
            self.handle_message(msg, now)
        if now >= self._next_cycle_s:
            self._next_cycle_s = now + self.config.cycle_period_s
            self.control_cycle(now)
        if self.config.heartbeat_s > 0 and now >= self._next_heartbeat_s:
            self._next_heartbeat_s = now + self.config.heartbeat_s
            self.heartbeat(now)

    def handle_message(self, msg: A2aMessage, now: float) -> None:  # per-role
        pass

    def control_cycle(self, now: float) -> None:  # per-role
        pass

    def heartbeat(self, now: float) -> None:  # per-role
        pass

    def describe(self) -> dict:
        period = self.config.cycle_period_s
        return {
            "agent_id": self.agent_id,
            "role": self.config.role,
            "parent_id": self.config.parent_id,
            "cycle_period_s": period if math.isfinite(period) else None,
            "guardrails": self.config.guardrails.to_dict(),
            "active_sub_intent": None,
        }


def report_to_message_body(report: ContextReport) -> str:
    return report.summary_text

"""Apex agent: accepts operator intents and routes them to layer managers."""

from __future__ import annotations

from typing import Callable

from ..fabric.bus import A2aMessage, MessageBus
from .base import AgentConfig, BaseAgent
from .types import Intent

DEFAULT_DOMAIN = "uplink-mac"


class RoutingError(ValueError):
    pass


class RanManager(BaseAgent):
    def __init__(
        self,
        config: AgentConfig,
        bus: MessageBus,
        layer_agents: dict[str, str],  # domain -> agent_id
        lake_append: Callable[..., object] | None = None,
        clock: Callable[[], float] = lambda: 0.0,
    ):
        super().__init__(config, bus, lake_append, clock)
        self.layer_agents = dict(layer_agents)

    def route_intent(self, intent: Intent) -> str:
        if not self.layer_agents:
            raise RoutingError("no layer agents registered")
        if len(set(self.layer_agents.values())) == 1:
            return next(iter(self.layer_agents.values()))
        domain = intent.domain or DEFAULT_DOMAIN
        agent = self.layer_agents.get(domain)
        if agent is None:
            raise RoutingError(f"no agent capable of domain {domain!r}")
        return agent

    def submit_intent(self, intent: Intent) -> str:
        """Route and forward an operator intent; returns the recipient id."""
        recipient = self.route_intent(intent)  # raises before any side effect
        self.log("lifecycle", {
            "event": "intent_accepted",
            "intent_id": intent.intent_id,
            "routed_to": recipient,
        })
        self.send(
            recipient,
            "intent",
            intent.body_text,
            body_structured=intent.to_dict(),
            correlation_id=intent.intent_id,
        )
        return recipient

    def handle_message(self, msg: A2aMessage, now: float) -> None:
        if msg.kind == "intent" and msg.body_structured:
            self.submit_intent(Intent.from_dict(msg.body_structured))
        elif msg.kind == "constraint_report":
            # escalation from a layer manager: record it for the operator
            self.log("lifecycle", {
                "event": "escalation_received",
                "from": msg.sender,
                "body_text": msg.body_text,
                "correlation_id": msg.correlation_id,
            })

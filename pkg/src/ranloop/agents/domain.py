"""Leaf control agents: power control (PC) and uplink resource allocation (RA).

Both run the same loop: pull a fresh KPI snapshot through the tool surface,
slide it into the 10-sample window, consult the reasoner under the active
sub-intent, clamp every proposal through the guardrails, dispatch the
survivors as tool calls, and record an auditable decision. A reasoner or
validation failure leaves network policy untouched.
"""

from __future__ import annotations

from typing import Callable

from ..fabric.bus import A2aMessage, MessageBus
from ..reasoner.output import validate_output
from ..reasoner.prompt import assemble_prompt
from ..reasoner.rules import StructuredContext
from ..sim.types import KpiSnapshot
from .base import AgentConfig, BaseAgent, SliceInfo, window_digest
from .guardrails import GuardrailViolation, apply_guardrails
from .types import (
    ContextReport,
    ControlAction,
    DecisionRecord,
    KpiWindow,
    SliceRequirement,
    SubIntent,
    WindowOrderingError,
    update_kpi_window,
)


class ControlAgent(BaseAgent):
    role_kind = "pc"

    def __init__(
        self,
        config: AgentConfig,
        bus: MessageBus,
        tools,
        reasoner,
        slices: list[SliceInfo],
        lake_append: Callable[..., object] | None = None,
        clock: Callable[[], float] = lambda: 0.0,
        initial_snr_targets: dict[int, float] | None = None,
        initial_throttles: dict[int, float] | None = None,
    ):
        super().__init__(config, bus, lake_append, clock)
        self.tools = tools
        self.reasoner = reasoner
        self.slices = list(slices)
        self.window = KpiWindow()
        self.history: list[DecisionRecord] = []
        self.active_sub_intent: SubIntent | None = None
        self.cycle_index = 0
        self.current_snr_targets = dict(initial_snr_targets or {})
        self.current_throttles = dict(initial_throttles or {})
        self._last_constraints: tuple[str, ...] = ()

    # -- messages --------------------------------------------------------------

    def handle_message(self, msg: A2aMessage, now: float) -> None:
        if msg.kind == "sub_intent" and msg.body_structured:
            sub = SubIntent.from_dict(msg.body_structured)
            self.active_sub_intent = sub
            self.send(
                msg.sender,
                "ack",
                f"{self.agent_id} accepted sub-intent {sub.sub_intent_id}",
                correlation_id=sub.parent_intent_id,
            )

    # -- cycle -----------------------------------------------------------------

    def control_cycle(self, now: float) -> None:
        snapshot = self._fetch_kpis()
        if snapshot is not None:
            try:
                self.window = update_kpi_window(self.window, snapshot)
            except WindowOrderingError:
                pass  # duplicate timestamp (cycle ran before the sim advanced)
            else:
                if self.history and self.history[-1].resulting_kpis is None:
                    self.history[-1].resulting_kpis = {
                        s.slice_id: s.aggregate_throughput_bps for s in snapshot.per_slice
                    }
        if self.active_sub_intent is None or not self.window.samples:
            return

        structured = self._structured_context()
        prompt = assemble_prompt(
            self.config.role,
            self.config.context_text,
            self.config.guardrails,
            self.active_sub_intent,
            self.window,
            self.history,
        )
        try:
            output = self.reasoner.decide(prompt, structured)
            output = validate_output(output, "actions")
        except Exception as exc:
            self.log("lifecycle", {
                "event": "reasoner_failure",
                "error": str(exc),
                "cycle_index": self.cycle_index,
            })
            self.cycle_index += 1
            return

        proposed, clamped, dispatched = [], [], []
        try:
            for action_dict in output.payload:
                action = ControlAction(
                    kind=action_dict["kind"],
                    value=float(action_dict["value"]),
                    ue_id=action_dict.get("ue_id"),
                    slice_id=action_dict.get("slice_id"),
                )
                current = self._current_value(action)
                if current is None:
                    continue
                applied = apply_guardrails(action, current, self.config.guardrails)
                if abs(applied.value - current) <= 1e-9:
                    continue  # clamped into a no-op; hold
                proposed.append(action.to_dict())
                clamped.append(applied.to_dict())
                dispatched.append(applied)
        except GuardrailViolation as exc:
            self.log("lifecycle", {
                "event": "proposal_rejected",
                "error": str(exc),
                "cycle_index": self.cycle_index,
            })
            self.cycle_index += 1
            return

        for action in dispatched:
            self._dispatch(action)

        if dispatched:
            record = DecisionRecord(
                agent_id=self.agent_id,
                cycle_index=self.cycle_index,
                input_window_digest=window_digest(self.window),
                proposed_actions=proposed,
                clamped_actions=clamped,
                rationale_text=output.rationale_text,
            )
            self.history.append(record)
            self.log("decision", record.to_dict())

        self._report_constraints()
        self.cycle_index += 1

    def heartbeat(self, now: float) -> None:
        if not self.window.samples or self.config.parent_id is None:
            return
        report = self.build_context_report()
        self.send(
            self.config.parent_id,
            "context_report",
            report.summary_text,
            body_structured=report.to_dict(),
            correlation_id=self.active_sub_intent.parent_intent_id
            if self.active_sub_intent
            else "",
        )

    # -- helpers ---------------------------------------------------------------

    def _fetch_kpis(self) -> KpiSnapshot | None:
        try:
            raw = self.tools.call_tool("get_kpis", window_s=self.config.cycle_period_s)
            return KpiSnapshot.from_dict(raw)
        except Exception as exc:
            self.log("lifecycle", {"event": "kpi_fetch_failed", "error": str(exc)})
            return None

    def _requirements(self) -> tuple[SliceRequirement, ...]:
        if self.active_sub_intent is None:
            return ()
        return self.active_sub_intent.requirements

    def _structured_context(self) -> StructuredContext:
        return StructuredContext(
            role=self.config.role,
            requirements=self._requirements(),
            slice_names={s.slice_id: s.name for s in self.slices},
            slice_ue_ids={s.slice_id: s.ue_ids for s in self.slices},
            guardrails=self.config.guardrails,
            current_snr_targets=dict(self.current_snr_targets),
            current_throttles=dict(self.current_throttles),
            slice_latest_bps={
                s.slice_id: v
                for s in self.slices
                if (v := self.window.slice_latest(s.slice_id)) is not None
            },
            slice_mean_bps={
                s.slice_id: v
                for s in self.slices
                if (v := self.window.slice_mean(s.slice_id)) is not None
            },
        )

    def _current_value(self, action: ControlAction) -> float | None:
        if action.kind == "snr_target":
            return self.current_snr_targets.get(action.ue_id)
        return self.current_throttles.get(action.slice_id)

    def _dispatch(self, action: ControlAction) -> None:
        if action.kind == "snr_target":
            ack = self.tools.call_tool(
                "set_snr_target", ue_id=action.ue_id, target_db=action.value
            )
            self.current_snr_targets[action.ue_id] = float(ack["applied_db"])
        else:
            ack = self.tools.call_tool(
                "set_throttle_limit", slice_id=action.slice_id, limit_bps=action.value
            )
            self.current_throttles[action.slice_id] = float(ack["applied_bps"])

    def unmet_requirements(self) -> tuple[str, ...]:
        """Requirement shortfalls visible in the freshest sample."""
        out = []
        for req in self._requirements():
            if not req.min_throughput_bps:
                continue
            latest = self.window.slice_latest(req.slice_id)
            if latest is None:
                continue
            if latest < req.min_throughput_bps:
                name = next(
                    (s.name for s in self.slices if s.slice_id == req.slice_id),
                    str(req.slice_id),
                )
                out.append(
                    f"{name} at {latest / 1e6:.1f} Mbit/s, below its required "
                    f"{req.min_throughput_bps / 1e6:g} Mbit/s"
                )
        return tuple(out)

    def build_context_report(self) -> ContextReport:
        """Slice-level window means plus any shortfalls, naming every slice."""
        if not self.window.samples:
            return ContextReport(
                reporter=self.agent_id,
                summary_text="no data: no KPI samples observed yet",
                metrics={},
                constraints=(),
            )
        metrics = {}
        parts = []
        for s in self.slices:
            mean = self.window.slice_mean(s.slice_id)
            if mean is None:
                continue
            metrics[str(s.slice_id)] = {"mean_throughput_bps": mean}
            parts.append(f"{s.name} averaging {mean / 1e6:.1f} Mbit/s")
        constraints = self.unmet_requirements()
        summary = f"{self.agent_id}: " + ", ".join(parts)
        if constraints:
            summary += "; constraints: " + "; ".join(constraints)
        else:
            summary += "; all requirements met"
        return ContextReport(
            reporter=self.agent_id,
            summary_text=summary,
            metrics=metrics,
            constraints=constraints,
        )

    def _report_constraints(self) -> None:
        """Edge-triggered upward constraint propagation."""
        if self.config.parent_id is None:
            return
        constraints = self.unmet_requirements()
        if constraints == self._last_constraints:
            return
        self._last_constraints = constraints
        report = self.build_context_report()
        kind = "constraint_report" if constraints else "context_report"
        self.send(
            self.config.parent_id,
            kind,
            report.summary_text,
            body_structured=report.to_dict(),
            correlation_id=self.active_sub_intent.parent_intent_id
            if self.active_sub_intent
            else "",
        )

    def describe(self) -> dict:
        d = super().describe()
        d["active_sub_intent"] = (
            self.active_sub_intent.to_dict() if self.active_sub_intent else None
        )
        return d


class PcAgent(ControlAgent):
    """Per-device SNR target owner."""


class UlRaAgent(ControlAgent):
    """Per-slice throttling limit owner."""


class DlRaStub(BaseAgent):
    """Protocol-test stand-in for a downlink scheduling agent: it only
    acknowledges sub-intents and remembers the last one."""

    def __init__(self, config: AgentConfig, bus: MessageBus,
                 lake_append=None, clock=lambda: 0.0):
        super().__init__(config, bus, lake_append, clock)
        self.active_sub_intent: SubIntent | None = None

    def handle_message(self, msg: A2aMessage, now: float) -> None:
        if msg.kind == "sub_intent" and msg.body_structured:
            self.active_sub_intent = SubIntent.from_dict(msg.body_structured)
            self.send(
                msg.sender,
                "ack",
                f"{self.agent_id} accepted sub-intent {self.active_sub_intent.sub_intent_id}",
                correlation_id=self.active_sub_intent.parent_intent_id,
            )

    def describe(self) -> dict:
        d = super().describe()
        d["active_sub_intent"] = (
            self.active_sub_intent.to_dict() if self.active_sub_intent else None
        )
        return d

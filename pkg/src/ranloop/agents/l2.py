"""Layer-2 manager: intent decomposition and constraint-driven renegotiation."""

from __future__ import annotations

from typing import Callable

from ..fabric.bus import A2aMessage, MessageBus
from ..reasoner.output import validate_output
from ..reasoner.prompt import assemble_prompt
from ..reasoner.rules import StructuredContext, parse_requirements
from .base import AgentConfig, BaseAgent, SliceInfo
from .types import ContextReport, Intent, KpiWindow, SliceRequirement, SubIntent


class DecompositionError(RuntimeError):
    """Reasoner could not produce usable sub-intents; previous ones stay active."""


class L2Manager(BaseAgent):
    def __init__(
        self,
        config: AgentConfig,
        bus: MessageBus,
        reasoner,
        slices: list[SliceInfo],
        children: dict[str, str],  # role -> agent_id, e.g. {"pc": "pc-agent"}
        lake_append: Callable[..., object] | None = None,
        clock: Callable[[], float] = lambda: 0.0,
    ):
        super().__init__(config, bus, lake_append, clock)
        self.reasoner = reasoner
        self.slices = list(slices)
        self.children = dict(children)
        self.active_intent: Intent | None = None
        self.active_sub_intents: dict[str, SubIntent] = {}
        self.child_reports: dict[str, ContextReport] = {}
        self.renegotiations = 0
        self.escalated = False

    # -- message handling -------------------------------------------------------

    def handle_message(self, msg: A2aMessage, now: float) -> None:
        if msg.kind == "intent" and msg.body_structured:
            intent = Intent.from_dict(msg.body_structured)
            self.accept_intent(intent, now)
        elif msg.kind == "constraint_report" and msg.body_structured:
            report = ContextReport.from_dict(msg.body_structured)
            self.child_reports[report.reporter] = report
            self.propagate_constraint(report, now)
        elif msg.kind == "context_report" and msg.body_structured:
            report = ContextReport.from_dict(msg.body_structured)
            self.child_reports[report.reporter] = report
            if not report.constraints:
                # child signals resolution; renegotiation pressure resets
                self.renegotiations = 0

    # -- decomposition ------------------------------------------------------------

    def accept_intent(self, intent: Intent, now: float) -> None:
        if not intent.requirements:
            parsed = parse_requirements(
                intent.body_text, {s.slice_id: s.name for s in self.slices}
            )
            intent = Intent(
                intent_id=intent.intent_id,
                issuer=intent.issuer,
                body_text=intent.body_text,
                requirements=tuple(parsed),
                timestamp_s=intent.timestamp_s,
                domain=intent.domain,
            )
        self.active_intent = intent
        self.renegotiations = 0
        self.escalated = False
        try:
            subs = self.decompose_intent(intent, constraints=())
        except DecompositionError as exc:
            self.log("lifecycle", {"event": "intent_rejected", "intent_id": intent.intent_id,
                                   "error": str(exc)})
            self.send(
                intent.issuer or self.config.parent_id or "operator",
                "ack",
                f"intent {intent.intent_id} rejected: {exc}",
                correlation_id=intent.intent_id,
            )
            return
        self._emit_sub_intents(subs, intent, replaced=False)

    def decompose_intent(
        self, intent: Intent, constraints: tuple[str, ...]
    ) -> dict[str, SubIntent]:
        """Consult the reasoner and materialize per-child sub-intents."""
        structured = StructuredContext(
            role="l2",
            requirements=intent.requirements,
            slice_names={s.slice_id: s.name for s in self.slices},
            slice_ue_ids={s.slice_id: s.ue_ids for s in self.slices},
            guardrails=self.config.guardrails,
            constraints=constraints,
            children_roles=tuple(sorted(self.children)),
        )
        placeholder = SubIntent(
            sub_intent_id=f"{intent.intent_id}/l2",
            parent_intent_id=intent.intent_id,
            issuer=self.agent_id,
            recipient_role="l2",
            body_text=intent.body_text,
            requirements=intent.requirements,
            timestamp_s=intent.timestamp_s,
        )
        prompt = assemble_prompt(
            "l2", self.config.context_text, self.config.guardrails,
            placeholder, KpiWindow(), [],
        )
        try:
            output = self.reasoner.decide(prompt, structured)
            output = validate_output(output, "sub_intents")
        except Exception as exc:
            raise DecompositionError(str(exc)) from exc

        subs: dict[str, SubIntent] = {}
        for payload in output.payload:
            role = payload["recipient_role"]
            if role not in self.children:
                continue
            subs[role] = SubIntent(
                sub_intent_id=f"{intent.intent_id}/{role}",
                parent_intent_id=intent.intent_id,
                issuer=self.agent_id,
                recipient_role=role,
                body_text=payload["body_text"],
                requirements=tuple(
                    SliceRequirement.from_dict(r) for r in payload.get("requirements", [])
                ),
                timestamp_s=intent.timestamp_s,
            )
        if not subs:
            raise DecompositionError("decomposition produced no sub-intents for known children")
        return subs

    def _emit_sub_intents(self, subs: dict[str, SubIntent], intent: Intent,
                          replaced: bool) -> None:
        for role in sorted(subs):
            sub = subs[role]
            previous = self.active_sub_intents.get(role)
            if replaced and previous is not None and previous == sub:
                continue  # unchanged; children keep cycling on it
            self.active_sub_intents[role] = sub
            self.send(
                self.children[role],
                "sub_intent",
                sub.body_text,
                body_structured=sub.to_dict(),
                correlation_id=intent.intent_id,
            )
        self.log(
            "lifecycle",
            {
                "event": "renegotiation" if replaced else "decomposition",
                "intent_id": intent.intent_id,
                "sub_intents": {r: s.to_dict() for r, s in sorted(subs.items())},
            },
        )

    # -- constraint propagation ----------------------------------------------------

    def propagate_constraint(self, report: ContextReport, now: float) -> None:
        """Re-decompose under the reported constraints; escalate after too
        many fruitless renegotiations."""
        if not report.constraints or self.active_intent is None:
            return
        self.renegotiations += 1
        if self.renegotiations >= self.config.max_renegotiations:
            if not self.escalated and self.config.parent_id:
                self.escalated = True
                self.send(
                    self.config.parent_id,
                    "constraint_report",
                    f"escalation: intent {self.active_intent.intent_id} still infeasible "
                    f"after {self.renegotiations} renegotiations; latest: "
                    + "; ".join(report.constraints),
                    body_structured=report.to_dict(),
                    correlation_id=self.active_intent.intent_id,
                )
                self.log("lifecycle", {
                    "event": "escalation",
                    "intent_id": self.active_intent.intent_id,
                    "renegotiations": self.renegotiations,
                })
            return
        try:
            subs = self.decompose_intent(self.active_intent, constraints=report.constraints)
        except DecompositionError as exc:
            self.log("lifecycle", {"event": "renegotiation_failed", "error": str(exc)})
            return
        changed = {
            role: sub
            for role, sub in subs.items()
            if self.active_sub_intents.get(role) != sub
        }
        if changed:
            self._emit_sub_intents(changed, self.active_intent, replaced=True)

    # -- upward context aggregation --------------------------------------------------

    def heartbeat(self, now: float) -> None:
        if self.config.parent_id is None or not self.child_reports:
            return
        report = self.build_context_report()
        self.send(
            self.config.parent_id,
            "context_report",
            report.summary_text,
            body_structured=report.to_dict(),
            correlation_id=self.active_intent.intent_id if self.active_intent else "",
        )

    def build_context_report(self) -> ContextReport:
        constraints = tuple(
            c for rep in self.child_reports.values() for c in rep.constraints
        )
        merged_metrics = {
            rep.reporter: rep.metrics for rep in self.child_reports.values()
        }
        summaries = [rep.summary_text for _, rep in sorted(self.child_reports.items())]
        return ContextReport(
            reporter=self.agent_id,
            summary_text=" | ".join(summaries) if summaries else "no child reports yet",
            metrics=merged_metrics,
            constraints=constraints,
        )

    def describe(self) -> dict:
        d = super().describe()
        d["active_sub_intent"] = (
            {r: s.to_dict() for r, s in sorted(self.active_sub_intents.items())}
            if self.active_sub_intents
            else None
        )
        d["active_intent"] = self.active_intent.to_dict() if self.active_intent else None
        return d

"""Deterministic prompt assembly: role, context, bounds, history, KPIs, task."""

from __future__ import annotations

from dataclasses import dataclass

from ..agents.types import DecisionRecord, GuardrailConfig, KpiWindow, SubIntent

HISTORY_DEPTH = 5

ROLE_TEXTS = {
    "pc": (
        "You are the uplink power-control agent for one cell. You choose "
        "per-device SNR targets; a real-time loop steps each device's "
        "transmit power toward your targets."
    ),
    "ra": (
        "You are the uplink scheduling agent for one cell. You set per-slice "
        "throttling limits consumed by a proportional-fair scheduler; every "
        "device in a slice shares that slice's cap."
    ),
    "l2": (
        "You are the layer-2 manager for one cell. You split operator intents "
        "into one sub-intent for the power-control agent and one for the "
        "uplink scheduling agent, and renegotiate when children report "
        "infeasibility."
    ),
}


@dataclass(frozen=True)
class PromptContext:
    role_text: str
    context_text: str
    bounds_text: str
    history: tuple[str, ...]
    kpi_digest: str
    task_text: str

    def render(self) -> str:
        history = "\n".join(self.history) if self.history else "none"
        return (
            f"## Role\n{self.role_text}\n\n"
            f"## Context\n{self.context_text}\n\n"
            f"## Bounds\n{self.bounds_text}\n\n"
            f"## Recent decisions\n{history}\n\n"
            f"## KPI window\n{self.kpi_digest}\n\n"
            f"## Task\n{self.task_text}\n"
        )


def render_bounds(guardrails: GuardrailConfig) -> str:
    lo, hi = guardrails.snr_target_bounds_db
    tlo, thi = guardrails.throttle_bounds_bps
    return (
        f"SNR target moves are limited to ±{guardrails.max_snr_delta_per_cycle_db:g} dB "
        f"per cycle with absolute bounds [{lo:g}, {hi:g}] dB. "
        f"Throttling limits must stay between {tlo / 1e6:g}-{thi / 1e6:g} Mbit/s."
    )


def _render_decision(record: DecisionRecord) -> str:
    actions = "; ".join(
        f"{a['kind']}"
        + (f" ue={a['ue_id']}" if a.get("ue_id") is not None else "")
        + (f" slice={a['slice_id']}" if a.get("slice_id") is not None else "")
        + f" -> {a['value']:g}"
        for a in record.clamped_actions
    ) or "no actions"
    suffix = ""
    if record.resulting_kpis:
        suffix = " | outcome: " + ", ".join(
            f"slice {k}: {v / 1e6:.1f} Mbit/s"
            for k, v in sorted(record.resulting_kpis.items())
        )
    return f"cycle {record.cycle_index}: {actions} ({record.rationale_text}){suffix}"


def render_kpi_digest(window: KpiWindow) -> str:
    if not window.samples:
        return "no samples yet"
    lines = []
    for snap in window.samples:
        slices = ", ".join(
            f"slice {s.slice_id}: {s.aggregate_throughput_bps / 1e6:.2f} Mbit/s "
            f"(util {s.prb_utilization_fraction:.2f})"
            for s in snap.per_slice
        )
        ues = ", ".join(
            f"ue {u.ue_id}: {u.throughput_bps / 1e6:.2f} Mbit/s snr {u.snr_db:.1f} dB "
            f"tx {u.tx_power_dbm:.1f} dBm"
            for u in snap.per_ue
        )
        lines.append(f"t={snap.timestamp_s:.3f}s | {slices} | {ues}")
    return "\n".join(lines)


def assemble_prompt(
    role: str,
    context_text: str,
    guardrails: GuardrailConfig,
    sub_intent: SubIntent,
    window: KpiWindow,
    history: list[DecisionRecord],
) -> PromptContext:
    """Render the five prompt sections; same inputs yield byte-identical text."""
    recent = history[-HISTORY_DEPTH:]
    return PromptContext(
        role_text=ROLE_TEXTS.get(role, f"You are the {role} agent."),
        context_text=context_text,
        bounds_text=render_bounds(guardrails),
        history=tuple(_render_decision(r) for r in recent),
        kpi_digest=render_kpi_digest(window),
        task_text=sub_intent.body_text,
    )

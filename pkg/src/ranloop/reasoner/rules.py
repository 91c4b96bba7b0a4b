"""Deterministic rule backend: NL requirement parsing, intent decomposition
templates, and the closed-loop action rules.

The rule set mirrors the qualitative control behaviors the live system needs:
protect a priority slice's minimum by throttling competitors and raising its
SNR target, walk battery-saver targets down while throughput allows, steer
spectral-efficiency slices toward a high-SNR setpoint, relax throttles again
when there is slack, and do nothing when everyone is satisfied.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..agents.types import GuardrailConfig, SliceRequirement
from .output import ReasonerOutput
from .prompt import PromptContext


@dataclass(frozen=True)
class RuleConstants:
    throttle_step: float = 0.20          # relative throttle move per cycle
    snr_step_db: float = 3.0             # target move per cycle (guardrail-sized)
    snr_setpoint_db: float = 15.0        # spectral-efficiency operating point
    snr_hold_tolerance_db: float = 0.25
    slack_margin: float = 1.1            # mins must be exceeded by this factor
    battery_margin: float = 2.0          # keep stepping down only above margin*min
    battery_moderate_floor_db: float = 0.0
    initial_ul_delay_share: float = 0.5  # RTT budget split before feedback
    congested_ul_delay_share: float = 0.8  # split once UL reports contention


@dataclass(frozen=True)
class BudgetSplit:
    ul_share: float
    dl_share: float


@dataclass(frozen=True)
class StructuredContext:
    """Machine-readable twin of the rendered prompt, for the rule backend."""

    role: str
    requirements: tuple[SliceRequirement, ...]
    slice_names: dict[int, str]
    slice_ue_ids: dict[int, tuple[int, ...]]
    guardrails: GuardrailConfig
    current_snr_targets: dict[int, float] = field(default_factory=dict)
    current_throttles: dict[int, float] = field(default_factory=dict)
    slice_latest_bps: dict[int, float] = field(default_factory=dict)
    slice_mean_bps: dict[int, float] = field(default_factory=dict)
    constraints: tuple[str, ...] = ()
    children_roles: tuple[str, ...] = ("pc", "ra")


class MissingStructuredContext(ValueError):
    """Rule backend cannot run without structured requirements; use the LLM
    backend for free-form input."""


# --- natural-language requirement extraction --------------------------------

_MBIT = re.compile(r"(\d+(?:\.\d+)?)\s*mbit/s", re.IGNORECASE)
_MS = re.compile(r"(\d+(?:\.\d+)?)\s*ms\b", re.IGNORECASE)


def _sentences(text: str) -> list[str]:
    parts = re.split(r"[.!?;]\s*", text)
    return [p.strip() for p in parts if p.strip()]


def _negated(sentence: str, keyword: str) -> bool:
    low = sentence.lower()
    idx = low.find(keyword)
    if idx < 0:
        return False
    prefix = low[:idx]
    return bool(re.search(r"\b(not|never|no|don't|do not|without)\b", prefix))


def parse_requirements(body_text: str, slices: dict[int, str]) -> list[SliceRequirement]:
    """Keyword extraction of structured requirements from operator text.

    Sentences naming exactly one slice bind to it; sentences naming none (or
    using all/both/every/any) bind to every slice. Recognizes priority,
    throughput minimums, delay bounds, battery saving and throughput/spectral
    focus, with simple negation ("do not throttle...").
    """
    fields: dict[int, dict] = {sid: {} for sid in slices}

    for sentence in _sentences(body_text):
        low = sentence.lower()
        named = [sid for sid, name in slices.items() if name.lower() in low]
        # sentences naming slices bind to them; unnamed sentences bind to all
        targets = named if named else list(slices)

        min_match = _MBIT.search(low)
        wants_min = min_match and re.search(
            r"\b(need|needs|minimum|at least|require|requires|guarantee|has)\b", low
        )
        delay_match = _MS.search(low)
        wants_delay = delay_match and re.search(r"\b(rtt|delay|latency)\b", low)
        high_priority = "priorit" in low and not _negated(low, "priorit")
        battery = None
        if "battery" in low or "energy" in low:
            if _negated(low, "battery") or _negated(low, "energy"):
                battery = "none"
            elif re.search(r"\b(lots|as much|aggressiv|maximum|minimize)\b", low):
                battery = "aggressive"
            else:
                battery = "moderate"
        throughput_seek = (
            re.search(r"\b(spectral efficiency|maximi[sz]e|high throughput|throughput of the)\b", low)
            is not None
            or (_negated(low, "throttle"))
        )

        for sid in targets:
            f = fields[sid]
            if wants_min:
                f["min_throughput_bps"] = float(min_match.group(1)) * 1e6
            if wants_delay:
                f["max_delay_s"] = float(delay_match.group(1)) / 1e3
            if high_priority:
                f["priority"] = "high"
            if battery is not None and battery != "none":
                f["battery_saving"] = battery
            elif battery == "none":
                f["battery_saving"] = "none"
            if throughput_seek:
                f["spectral_efficiency_focus"] = True

    out = []
    for sid in sorted(fields):
        f = fields[sid]
        if not f or all(f.get(k) in (None, "none", "normal", False) for k in f):
            continue
        out.append(
            SliceRequirement(
                slice_id=sid,
                priority=f.get("priority", "normal"),
                min_throughput_bps=f.get("min_throughput_bps"),
                max_delay_s=f.get("max_delay_s"),
                battery_saving=f.get("battery_saving", "none"),
                spectral_efficiency_focus=f.get("spectral_efficiency_focus", False),
            )
        )
    return out


# --- decomposition templates -------------------------------------------------

def _mbps(value: float) -> str:
    return f"{value / 1e6:g} Mbit/s"


def decompose_requirements(
    requirements: list[SliceRequirement],
    slice_names: dict[int, str],
    constraints: tuple[str, ...] = (),
    children_roles: tuple[str, ...] = ("pc", "ra"),
    constants: RuleConstants = RuleConstants(),
) -> list[dict]:
    """Split parent requirements into power-control and scheduling sub-intents.

    Every parent requirement field lands in at least one child: power-domain
    fields (battery, SNR posture) go to the PC child, scheduling fields
    (priority, minimums, delay budgets) go to the RA child, and shared fields
    ride with both. Returns payload dicts for a sub_intents output.
    """
    reqs = sorted(requirements, key=lambda r: r.slice_id)
    pc_reqs, ra_reqs, dl_reqs = [], [], []
    pc_clauses, ra_clauses, dl_clauses = [], [], []

    split = BudgetSplit(constants.initial_ul_delay_share, 1 - constants.initial_ul_delay_share)
    if any("contention" in c.lower() for c in constraints):
        split = BudgetSplit(
            constants.congested_ul_delay_share, 1 - constants.congested_ul_delay_share
        )

    for req in reqs:
        name = slice_names.get(req.slice_id, f"slice {req.slice_id}")

        pc_reqs.append(
            SliceRequirement(
                slice_id=req.slice_id,
                priority=req.priority,
                min_throughput_bps=req.min_throughput_bps,
                battery_saving=req.battery_saving,
                spectral_efficiency_focus=req.spectral_efficiency_focus,
            )
        )
        if req.battery_saving == "aggressive":
            pc_clauses.append(f"Give {name} low power to save as much battery as possible")
        elif req.battery_saving == "moderate":
            pc_clauses.append(f"Trim {name} power where throughput allows")
        elif req.priority == "high" and req.min_throughput_bps:
            pc_clauses.append(
                f"Raise the {name} SNR target so it can sustain its "
                f"{_mbps(req.min_throughput_bps)} minimum"
            )
        elif req.spectral_efficiency_focus:
            pc_clauses.append(f"Hold {name} at a high SNR target for spectral efficiency")

        ul_delay = req.max_delay_s * split.ul_share if req.max_delay_s else None
        ra_reqs.append(
            SliceRequirement(
                slice_id=req.slice_id,
                priority=req.priority,
                min_throughput_bps=req.min_throughput_bps,
                max_delay_s=ul_delay,
                spectral_efficiency_focus=req.spectral_efficiency_focus,
            )
        )
        if req.priority == "high" and req.min_throughput_bps:
            ra_clauses.append(
                f"Treat {name} as high priority and allocate enough resources to "
                f"guarantee at least {_mbps(req.min_throughput_bps)}"
            )
        elif req.min_throughput_bps:
            ra_clauses.append(f"Keep {name} at {_mbps(req.min_throughput_bps)}")
        elif req.priority == "high":
            ra_clauses.append(f"Prioritize {name} when scheduling")
        elif req.spectral_efficiency_focus:
            ra_clauses.append(f"Remove throughput limits for {name}")
        if ul_delay is not None:
            ra_clauses.append(
                f"Serve {name} uplink with at most {ul_delay * 1e3:g} ms of delay"
            )

        if req.max_delay_s is not None and "dl" in children_roles:
            dl_delay = req.max_delay_s * split.dl_share
            dl_reqs.append(
                SliceRequirement(
                    slice_id=req.slice_id,
                    priority=req.priority,
                    max_delay_s=dl_delay,
                )
            )
            dl_clauses.append(
                f"Serve {name} downlink with at most {dl_delay * 1e3:g} ms of delay"
            )

    subs = [
        {
            "recipient_role": "pc",
            "body_text": (". ".join(pc_clauses) + "." if pc_clauses
                          else "Hold current power-control targets."),
            "requirements": [r.to_dict() for r in pc_reqs],
        },
        {
            "recipient_role": "ra",
            "body_text": (". ".join(ra_clauses) + "." if ra_clauses
                          else "Hold current scheduling policy."),
            "requirements": [r.to_dict() for r in ra_reqs],
        },
    ]
    if dl_reqs:
        subs.append(
            {
                "recipient_role": "dl",
                "body_text": ". ".join(dl_clauses) + ".",
                "requirements": [r.to_dict() for r in dl_reqs],
            }
        )
    return subs


# --- closed-loop action rules -------------------------------------------------

class RuleBasedReasoner:
    """Deterministic stand-in for a remote model; same ins and outs."""

    def __init__(self, constants: RuleConstants = RuleConstants()):
        self.constants = constants

    def decide(self, prompt: PromptContext, structured: StructuredContext | None
               ) -> ReasonerOutput:
        if structured is None or not isinstance(structured, StructuredContext):
            raise MissingStructuredContext(
                "rule backend needs structured requirements; configure the llm backend "
                "for free-form prompts"
            )
        if structured.role == "l2":
            subs = decompose_requirements(
                list(structured.requirements),
                structured.slice_names,
                constraints=structured.constraints,
                children_roles=structured.children_roles,
                constants=self.constants,
            )
            return ReasonerOutput(
                kind="sub_intents",
                payload=subs,
                rationale_text="split requirements into power and scheduling domains",
            )
        if structured.role == "pc":
            actions, why = self._pc_actions(structured)
        elif structured.role == "ra":
            actions, why = self._ra_actions(structured)
        else:
            raise MissingStructuredContext(f"no rules for role {structured.role!r}")
        return ReasonerOutput(kind="actions", payload=actions, rationale_text=why)

    # power control: one target decision per slice, applied per UE
    def _pc_actions(self, ctx: StructuredContext):
        c = self.constants
        lo, hi = ctx.guardrails.snr_target_bounds_db
        step = c.snr_step_db
        req_by_slice = {r.slice_id: r for r in ctx.requirements}
        actions: list[dict] = []
        reasons: list[str] = []

        for slice_id in sorted(ctx.slice_names):
            req = req_by_slice.get(slice_id)
            if req is None:
                continue
            name = ctx.slice_names[slice_id]
            latest = ctx.slice_latest_bps.get(slice_id)
            for ue_id in ctx.slice_ue_ids.get(slice_id, ()):
                current = ctx.current_snr_targets.get(ue_id)
                if current is None:
                    continue
                goal = None
                why = None
                if (
                    req.priority == "high"
                    and req.min_throughput_bps
                    and latest is not None
                    and latest < req.min_throughput_bps
                ):
                    goal = min(current + step, hi)
                    why = (f"{name} below its {_mbps(req.min_throughput_bps)} minimum; "
                           f"raising its SNR target")
                elif req.battery_saving in ("aggressive", "moderate"):
                    floor = lo if req.battery_saving == "aggressive" else max(
                        lo, c.battery_moderate_floor_db
                    )
                    if req.min_throughput_bps and latest is not None:
                        if latest < req.min_throughput_bps:
                            goal = min(current + step, hi)
                            why = (f"{name} fell under {_mbps(req.min_throughput_bps)}; "
                                   f"stepping power back up")
                        elif (
                            latest >= req.min_throughput_bps * c.battery_margin
                            and current > floor
                        ):
                            goal = max(current - step, floor)
                            why = f"{name} has throughput headroom; stepping power down to save battery"
                    elif current > floor:
                        goal = max(current - step, floor)
                        why = f"{name} saving battery; stepping power down"
                elif req.spectral_efficiency_focus:
                    if abs(c.snr_setpoint_db - current) > c.snr_hold_tolerance_db:
                        delta = max(-step, min(step, c.snr_setpoint_db - current))
                        goal = current + delta
                        why = f"steering {name} toward the {c.snr_setpoint_db:g} dB efficiency setpoint"
                if goal is not None and abs(goal - current) > 1e-9:
                    actions.append({"kind": "snr_target", "ue_id": ue_id, "value": goal})
                    if why and why not in reasons:
                        reasons.append(why)
        if not actions:
            return [], "power targets satisfy current requirements; holding"
        return actions, "; ".join(reasons)

    # scheduling: per-slice throttle decisions
    def _ra_actions(self, ctx: StructuredContext):
        c = self.constants
        lo, hi = ctx.guardrails.throttle_bounds_bps
        req_by_slice = {r.slice_id: r for r in ctx.requirements}
        actions: list[dict] = []
        reasons: list[str] = []

        unmet = [
            r
            for r in ctx.requirements
            if r.priority == "high"
            and r.min_throughput_bps
            and ctx.slice_latest_bps.get(r.slice_id) is not None
            and ctx.slice_latest_bps[r.slice_id] < r.min_throughput_bps
        ]

        if unmet:
            protected = {r.slice_id for r in unmet}
            names = ", ".join(ctx.slice_names[s] for s in sorted(protected))
            for slice_id in sorted(ctx.slice_names):
                if slice_id in protected:
                    continue
                current = ctx.current_throttles.get(slice_id)
                if current is None:
                    continue
                goal = max(current * (1 - c.throttle_step), lo)
                if abs(goal - current) > 1e-6:
                    actions.append(
                        {"kind": "throttle_limit", "slice_id": slice_id, "value": goal}
                    )
            if actions:
                reasons.append(f"{names} below required minimum; throttling competing slices")
            return actions, ("; ".join(reasons) if reasons
                             else f"{names} below minimum but competing throttles already at floor")

        # no unmet priority minimums: consider relaxing throttles
        slack = all(
            ctx.slice_latest_bps.get(r.slice_id, 0.0) >= r.min_throughput_bps * c.slack_margin
            for r in ctx.requirements
            if r.min_throughput_bps
        )
        total_latest = sum(ctx.slice_latest_bps.values())
        total_ues = sum(len(v) for v in ctx.slice_ue_ids.values())
        fair_per_ue = total_latest / total_ues if total_ues else 0.0

        for slice_id in sorted(ctx.slice_names):
            req = req_by_slice.get(slice_id)
            current = ctx.current_throttles.get(slice_id)
            if current is None:
                continue
            name = ctx.slice_names[slice_id]
            # unthrottle: throughput-seeking slice with no cap-shaped requirement
            if (
                req is not None
                and req.spectral_efficiency_focus
                and req.priority == "normal"
                and not req.min_throughput_bps
                and current < hi
            ):
                actions.append({"kind": "throttle_limit", "slice_id": slice_id, "value": hi})
                reasons.append(f"removing throughput limit for {name}")
                continue
            # gradual recovery while there is slack
            if not slack or current >= hi:
                continue
            ue_count = len(ctx.slice_ue_ids.get(slice_id, ()))
            if ue_count == 0:
                continue
            per_ue = ctx.slice_latest_bps.get(slice_id, 0.0) / ue_count
            min_bearing = req is not None and req.min_throughput_bps
            if per_ue < fair_per_ue and not min_bearing:
                goal = min(current * (1 + c.throttle_step), hi)
                actions.append({"kind": "throttle_limit", "slice_id": slice_id, "value": goal})
                reasons.append(f"{name} below fair share with slack present; relaxing its throttle")

        if not actions:
            return [], "scheduling requirements satisfied; holding throttles"
        return actions, "; ".join(reasons)

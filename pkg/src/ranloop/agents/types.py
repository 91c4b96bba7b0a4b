"""Structured intent, requirement, window and decision types shared by agents."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..sim.types import KpiSnapshot

PRIORITIES = ("high", "normal", "low")
BATTERY_MODES = ("none", "moderate", "aggressive")


@dataclass(frozen=True)
class SliceRequirement:
    slice_id: int
    priority: str = "normal"
    min_throughput_bps: float | None = None
    max_delay_s: float | None = None
    battery_saving: str = "none"
    spectral_efficiency_focus: bool = False

    def __post_init__(self):
        if self.priority not in PRIORITIES:
            raise ValueError(f"priority {self.priority!r} not in {PRIORITIES}")
        if self.battery_saving not in BATTERY_MODES:
            raise ValueError(f"battery_saving {self.battery_saving!r} not in {BATTERY_MODES}")
        if (
            self.priority == "normal"
            and self.min_throughput_bps is None
            and self.max_delay_s is None
            and self.battery_saving == "none"
            and not self.spectral_efficiency_focus
        ):
            raise ValueError("requirement must set at least one field beyond slice_id")

    def to_dict(self) -> dict:
        return {
            "slice_id": self.slice_id,
            "priority": self.priority,
            "min_throughput_bps": self.min_throughput_bps,
            "max_delay_s": self.max_delay_s,
            "battery_saving": self.battery_saving,
            "spectral_efficiency_focus": self.spectral_efficiency_focus,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SliceRequirement":
        return cls(
            slice_id=int(d["slice_id"]),
            priority=d.get("priority", "normal"),
            min_throughput_bps=(
                None if d.get("min_throughput_bps") is None else float(d["min_throughput_bps"])
            ),
            max_delay_s=None if d.get("max_delay_s") is None else float(d["max_delay_s"]),
            battery_saving=d.get("battery_saving", "none"),
            spectral_efficiency_focus=bool(d.get("spectral_efficiency_focus", False)),
        )


@dataclass(frozen=True)
class Intent:
    intent_id: str
    issuer: str
    body_text: str
    requirements: tuple[SliceRequirement, ...] = ()
    timestamp_s: float = 0.0
    domain: str | None = None

    def __post_init__(self):
        if not self.body_text:
            raise ValueError("intent body_text must be non-empty")

    def to_dict(self) -> dict:
        return {
            "intent_id": self.intent_id,
            "issuer": self.issuer,
            "body_text": self.body_text,
            "requirements": [r.to_dict() for r in self.requirements],
            "timestamp_s": self.timestamp_s,
            "domain": self.domain,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Intent":
        return cls(
            intent_id=d["intent_id"],
            issuer=d.get("issuer", ""),
            body_text=d["body_text"],
            requirements=tuple(
                SliceRequirement.from_dict(r) for r in d.get("requirements", [])
            ),
            timestamp_s=float(d.get("timestamp_s", 0.0)),
            domain=d.get("domain"),
        )


@dataclass(frozen=True)
class SubIntent:
    sub_intent_id: str
    parent_intent_id: str
    issuer: str
    recipient_role: str  # "pc" | "ra" | "dl"
    body_text: str
    requirements: tuple[SliceRequirement, ...] = ()
    timestamp_s: float = 0.0

    def __post_init__(self):
        if not self.body_text:
            raise ValueError("sub-intent body_text must be non-empty")

    def to_dict(self) -> dict:
        return {
            "sub_intent_id": self.sub_intent_id,
            "parent_intent_id": self.parent_intent_id,
            "issuer": self.issuer,
            "recipient_role": self.recipient_role,
            "body_text": self.body_text,
            "requirements": [r.to_dict() for r in self.requirements],
            "timestamp_s": self.timestamp_s,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SubIntent":
        return cls(
            sub_intent_id=d["sub_intent_id"],
            parent_intent_id=d["parent_intent_id"],
            issuer=d.get("issuer", ""),
            recipient_role=d["recipient_role"],
            body_text=d["body_text"],
            requirements=tuple(
                SliceRequirement.from_dict(r) for r in d.get("requirements", [])
            ),
            timestamp_s=float(d.get("timestamp_s", 0.0)),
        )


@dataclass(frozen=True)
class GuardrailConfig:
    max_snr_delta_per_cycle_db: float = 3.0
    snr_target_bounds_db: tuple[float, float] = (-15.0, 18.0)
    throttle_bounds_bps: tuple[float, float] = (3e6, 1e8)

    def __post_init__(self):
        if self.max_snr_delta_per_cycle_db <= 0:
            raise ValueError("per-cycle SNR delta must be positive")
        if self.snr_target_bounds_db[0] >= self.snr_target_bounds_db[1]:
            raise ValueError("SNR bounds must satisfy min < max")
        if self.throttle_bounds_bps[0] >= self.throttle_bounds_bps[1]:
            raise ValueError("throttle bounds must satisfy min < max")

    def to_dict(self) -> dict:
        return {
            "max_snr_delta_per_cycle_db": self.max_snr_delta_per_cycle_db,
            "snr_target_bounds_db": list(self.snr_target_bounds_db),
            "throttle_bounds_bps": list(self.throttle_bounds_bps),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GuardrailConfig":
        return cls(
            max_snr_delta_per_cycle_db=float(d.get("max_snr_delta_per_cycle_db", 3.0)),
            snr_target_bounds_db=tuple(d.get("snr_target_bounds_db", (-15.0, 18.0))),
            throttle_bounds_bps=tuple(d.get("throttle_bounds_bps", (3e6, 1e8))),
        )


KPI_WINDOW_CAPACITY = 10


class WindowOrderingError(ValueError):
    """A snapshot arrived with a timestamp not later than the newest sample."""


@dataclass(frozen=True)
class KpiWindow:
    capacity: int = KPI_WINDOW_CAPACITY
    samples: tuple[KpiSnapshot, ...] = ()

    def latest(self) -> KpiSnapshot | None:
        return self.samples[-1] if self.samples else None

    def slice_mean(self, slice_id: int) -> float | None:
        values = [
            s.aggregate_throughput_bps
            for snap in self.samples
            for s in snap.per_slice
            if s.slice_id == slice_id
        ]
        return sum(values) / len(values) if values else None

    def slice_latest(self, slice_id: int) -> float | None:
        if not self.samples:
            return None
        for s in self.samples[-1].per_slice:
            if s.slice_id == slice_id:
                return s.aggregate_throughput_bps
        return None


def update_kpi_window(window: KpiWindow, snapshot: KpiSnapshot) -> KpiWindow:
    """Append a snapshot, evicting the oldest beyond capacity. Timestamps
    must be strictly increasing."""
    if window.samples and snapshot.timestamp_s <= window.samples[-1].timestamp_s:
        raise WindowOrderingError(
            f"snapshot at {snapshot.timestamp_s} not later than "
            f"{window.samples[-1].timestamp_s}"
        )
    samples = window.samples + (snapshot,)
    if len(samples) > window.capacity:
        samples = samples[-window.capacity:]
    return KpiWindow(capacity=window.capacity, samples=samples)


@dataclass(frozen=True)
class ControlAction:
    kind: str  # "snr_target" | "throttle_limit"
    value: float
    ue_id: int | None = None
    slice_id: int | None = None
    previous: float | None = None

    def __post_init__(self):
        if self.kind not in ("snr_target", "throttle_limit"):
            raise ValueError(f"unknown action kind {self.kind!r}")
        if self.kind == "snr_target" and self.ue_id is None:
            raise ValueError("snr_target action needs ue_id")
        if self.kind == "throttle_limit" and self.slice_id is None:
            raise ValueError("throttle_limit action needs slice_id")

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "value": self.value, "previous": self.previous}
        if self.ue_id is not None:
            d["ue_id"] = self.ue_id
        if self.slice_id is not None:
            d["slice_id"] = self.slice_id
        return d


@dataclass(frozen=True)
class ContextReport:
    reporter: str
    summary_text: str
    metrics: dict
    constraints: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.summary_text:
            raise ValueError("summary_text must be non-empty")

    def to_dict(self) -> dict:
        return {
            "reporter": self.reporter,
            "summary_text": self.summary_text,
            "metrics": self.metrics,
            "constraints": list(self.constraints),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ContextReport":
        return cls(
            reporter=d["reporter"],
            summary_text=d["summary_text"],
            metrics=d.get("metrics", {}),
            constraints=tuple(d.get("constraints", ())),
        )


@dataclass
class DecisionRecord:
    agent_id: str
    cycle_index: int
    input_window_digest: str
    proposed_actions: list[dict]
    clamped_actions: list[dict]
    rationale_text: str
    resulting_kpis: dict | None = None

    def to_dict(self) -> dict:
        return {
            "agent_id": self.agent_id,
            "cycle_index": self.cycle_index,
            "input_window_digest": self.input_window_digest,
            "proposed_actions": self.proposed_actions,
            "clamped_actions": self.clamped_actions,
            "rationale_text": self.rationale_text,
            "resulting_kpis": self.resulting_kpis,
        }

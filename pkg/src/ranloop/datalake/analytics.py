"""Log analytics: intent-violation detection and per-agent behavior reports."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .store import DataLake, LogRecord


@dataclass
class ViolationReport:
    intent_id: str
    slice_id: int
    requirement: dict
    observed_bps: float
    required_bps: float
    start_s: float
    end_s: float
    resolved: bool

    def to_dict(self) -> dict:
        return {
            "intent_id": self.intent_id,
            "slice_id": self.slice_id,
            "requirement": self.requirement,
            "observed_bps": self.observed_bps,
            "required_bps": self.required_bps,
            "start_s": self.start_s,
            "end_s": self.end_s,
            "resolved": self.resolved,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ViolationReport":
        return cls(
            intent_id=d["intent_id"],
            slice_id=int(d["slice_id"]),
            requirement=d["requirement"],
            observed_bps=float(d["observed_bps"]),
            required_bps=float(d["required_bps"]),
            start_s=float(d["start_s"]),
            end_s=float(d["end_s"]),
            resolved=bool(d["resolved"]),
        )


@dataclass
class _SliceTracker:
    required_bps: float
    window_s: float
    samples: deque = field(default_factory=deque)  # (ts, value)
    fail_streak: int = 0
    pass_streak: int = 0
    first_fail_ts: float | None = None
    first_pass_ts: float | None = None
    open_report: ViolationReport | None = None

    def feed(self, ts: float, value: float):
        """Returns ("open", report) / ("close", report) / None."""
        self.samples.append((ts, value))
        while self.samples and self.samples[0][0] <= ts - self.window_s:
            self.samples.popleft()
        mean = sum(v for _, v in self.samples) / len(self.samples)
        failing = mean < self.required_bps

        if failing:
            self.pass_streak = 0
            self.fail_streak += 1
            if self.fail_streak == 1:
                self.first_fail_ts = ts
            # debounce: a single failing sample is noise, two opens a violation
            if self.fail_streak == 2 and self.open_report is None:
                self.open_report = ViolationReport(
                    intent_id="",  # filled by caller
                    slice_id=-1,
                    requirement={},
                    observed_bps=mean,
                    required_bps=self.required_bps,
                    start_s=self.first_fail_ts,
                    end_s=ts,
                    resolved=False,
                )
                return ("open", self.open_report)
        else:
            self.fail_streak = 0
            self.pass_streak += 1
            if self.pass_streak == 1:
                self.first_pass_ts = ts
            if self.pass_streak == 2 and self.open_report is not None:
                report = self.open_report
                # closed at the first of the two consecutive passing samples
                report.end_s = self.first_pass_ts
                report.resolved = True
                self.open_report = None
                return ("close", report)
        if self.open_report is not None:
            self.open_report.end_s = ts
        return None


class ViolationDetector:
    """Incremental detector: feed per-slice KPI samples, collect reports.

    A violation opens when the windowed mean of a governed metric fails its
    requirement for two consecutive samples, and resolves after two
    consecutive passing samples.
    """

    def __init__(self, intent_id: str, requirements: list[dict], window_s: float = 10.0):
        self.intent_id = intent_id
        self._trackers: dict[int, _SliceTracker] = {}
        self._requirements: dict[int, dict] = {}
        for req in requirements:
            min_bps = req.get("min_throughput_bps")
            if min_bps is None:
                continue
            slice_id = int(req["slice_id"])
            self._trackers[slice_id] = _SliceTracker(required_bps=float(min_bps),
                                                     window_s=window_s)
            self._requirements[slice_id] = {"min_throughput_bps": float(min_bps)}
        self.reports: list[ViolationReport] = []

    @property
    def has_quantitative_requirements(self) -> bool:
        return bool(self._trackers)

    def feed_snapshot(self, timestamp_s: float, slice_throughputs: dict[int, float]):
        """Returns a list of ("open"|"close", ViolationReport) transitions."""
        events = []
        for slice_id, tracker in self._trackers.items():
            if slice_id not in slice_throughputs:
                continue
            event = tracker.feed(timestamp_s, slice_throughputs[slice_id])
            if event is not None:
                action, report = event
                report.intent_id = self.intent_id
                report.slice_id = slice_id
                report.requirement = self._requirements[slice_id]
                if action == "open":
                    self.reports.append(report)
                events.append((action, report))
        return events


def _slice_throughputs(kpi_payload: dict) -> dict[int, float]:
    return {
        int(s["slice_id"]): float(s["aggregate_throughput_bps"])
        for s in kpi_payload.get("per_slice", [])
    }


def detect_violations(store: DataLake, intent: dict, window_s: float = 10.0
                      ) -> list[ViolationReport]:
    """Pure function of the log: replay KPI records from the intent's
    timestamp and report every debounced requirement violation."""
    requirements = intent.get("requirements", [])
    detector = ViolationDetector(intent.get("intent_id", ""), requirements, window_s)
    if not detector.has_quantitative_requirements:
        raise ValueError("intent has no quantitative requirement to check")
    start = float(intent.get("timestamp_s", 0.0))
    for rec in store.iter_records():
        if rec.kind != "kpi" or rec.timestamp_s <= start:
            continue
        detector.feed_snapshot(rec.timestamp_s, _slice_throughputs(rec.payload))
    return detector.reports


@dataclass
class BehaviorSummary:
    agent_id: str
    found: bool
    action_counts: dict
    clamp_count: int
    max_step_count: int
    longest_max_step_run: int
    violation_overlap_ratio: float
    top_clamped: list
    text: str

    def to_dict(self) -> dict:
        return {
            "agent_id": self.agent_id,
            "found": self.found,
            "action_counts": self.action_counts,
            "clamp_count": self.clamp_count,
            "max_step_count": self.max_step_count,
            "longest_max_step_run": self.longest_max_step_run,
            "violation_overlap_ratio": self.violation_overlap_ratio,
            "top_clamped": self.top_clamped,
            "text": self.text,
        }


def _violation_intervals(records: list[LogRecord]) -> list[tuple[float, float]]:
    intervals = []
    open_starts: dict[tuple[str, int], float] = {}
    for rec in records:
        if rec.kind != "violation":
            continue
        report = rec.payload.get("report", rec.payload)
        key = (report.get("intent_id", ""), int(report.get("slice_id", -1)))
        if rec.payload.get("event") == "open":
            open_starts[key] = float(report["start_s"])
        elif rec.payload.get("event") == "resolved":
            start = open_starts.pop(key, float(report["start_s"]))
            intervals.append((start, float(report["end_s"])))
    for key, start in open_starts.items():
        intervals.append((start, float("inf")))
    return intervals


def summarize_agent_behavior(store: DataLake, agent_id: str, t0: float, t1: float,
                             max_step_db: float = 3.0) -> BehaviorSummary:
    """Roll up one agent's decisions: what it did, how often the guardrails
    bit, and how much of its activity overlapped open violations."""
    records = store.query_range(None, t0, t1)
    decisions = [r for r in records if r.kind == "decision" and r.agent_id == agent_id]
    if not decisions:
        return BehaviorSummary(
            agent_id=agent_id,
            found=False,
            action_counts={},
            clamp_count=0,
            max_step_count=0,
            longest_max_step_run=0,
            violation_overlap_ratio=0.0,
            top_clamped=[],
            text=f"no decision records for agent '{agent_id}' in window",
        )

    intervals = _violation_intervals(records)
    action_counts: dict[str, int] = {}
    clamp_count = 0
    clamped_actions = []
    max_step_count = 0
    longest_run = 0
    current_run = 0
    overlapping = 0

    for rec in decisions:
        proposed = rec.payload.get("proposed_actions", [])
        clamped = rec.payload.get("clamped_actions", [])
        cycle_has_max_step = False
        for p, c in zip(proposed, clamped):
            kind = c.get("kind", "unknown")
            action_counts[kind] = action_counts.get(kind, 0) + 1
            if p.get("value") != c.get("value"):
                clamp_count += 1
                clamped_actions.append(
                    {
                        "cycle_index": rec.payload.get("cycle_index"),
                        "kind": kind,
                        "proposed": p.get("value"),
                        "applied": c.get("value"),
                        "overshoot": abs(float(p.get("value", 0)) - float(c.get("value", 0))),
                    }
                )
            previous = c.get("previous")
            if (
                kind == "snr_target"
                and previous is not None
                and abs(float(c["value"]) - float(previous)) >= max_step_db - 1e-9
            ):
                max_step_count += 1
                cycle_has_max_step = True
        if cycle_has_max_step:
            current_run += 1
            longest_run = max(longest_run, current_run)
        else:
            current_run = 0
        if any(a <= rec.timestamp_s <= b for a, b in intervals):
            overlapping += 1

    clamped_actions.sort(key=lambda c: -c["overshoot"])
    top = clamped_actions[:3]
    lines = [
        f"agent '{agent_id}': {len(decisions)} acting cycles in [{t0:g}, {t1:g}] s",
        "actions: " + (", ".join(f"{k}={v}" for k, v in sorted(action_counts.items())) or "none"),
        f"guardrail clamps: {clamp_count}",
        f"max-magnitude target steps: {max_step_count} (longest consecutive run {longest_run})",
        f"violation overlap: {overlapping}/{len(decisions)} cycles",
    ]
    if top:
        lines.append("top clamped proposals (improvement opportunities):")
        for c in top:
            lines.append(
                f"  cycle {c['cycle_index']}: {c['kind']} proposed {c['proposed']} "
                f"applied {c['applied']}"
            )
    return BehaviorSummary(
        agent_id=agent_id,
        found=True,
        action_counts=action_counts,
        clamp_count=clamp_count,
        max_step_count=max_step_count,
        longest_max_step_run=longest_run,
        violation_overlap_ratio=overlapping / len(decisions),
        top_clamped=top,
        text="\n".join(lines),
    )

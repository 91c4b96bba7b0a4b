"""Scenario assembly and the headless virtual-clock driver.

One driver owns the clock: simulator slots advance at slot granularity and
once per KPI period the driver snapshots measurements, feeds violation
detectors, and steps every agent in a fixed order (manager, L2, PC, RA, DL).
All randomness comes from the scenario seed, so one configuration yields one
byte-level trajectory.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..agents.base import AgentConfig, SliceInfo
from ..agents.domain import DlRaStub, PcAgent, UlRaAgent
from ..agents.l2 import L2Manager
from ..agents.manager import RanManager
from ..agents.types import GuardrailConfig, Intent, SliceRequirement
from ..datalake.analytics import ViolationDetector
from ..datalake.store import BufferingWriter, DataLake
from ..fabric.bus import MessageBus
from ..fabric.tcp import FrameClient, make_dispatcher, serve_dispatcher
from ..reasoner.llm import EndpointConfig, LlmReasoner
from ..reasoner.rules import RuleBasedReasoner, RuleConstants, parse_requirements
from ..sim.simulator import SLOT_CSV_COLUMNS, UplinkSimulator
from ..sim.types import CellConfig, SliceConfig, UeConfig
from .dapp import LocalToolClient, build_control_surface


class ScenarioError(ValueError):
    """Configuration rejected before any side effects; names the field."""

    def __init__(self, fieldname: str, message: str):
        super().__init__(f"field '{fieldname}': {message}")
        self.fieldname = fieldname


@dataclass(frozen=True)
class PhaseSpec:
    start_s: float
    name: str
    body_text: str
    requirements: tuple[SliceRequirement, ...] = ()
    domain: str | None = None


@dataclass
class ScenarioConfig:
    seed: int
    duration_s: float
    cell: CellConfig
    slices: list[SliceConfig]
    ues: list[UeConfig]
    phases: list[PhaseSpec]
    kpi_period_s: float = 1.0
    time_compression: float = 1.0
    violation_window_s: float = 10.0
    cycle_period_s: float = 1.0
    heartbeat_s: float = 10.0
    max_renegotiations: int = 3
    guardrails: GuardrailConfig = field(default_factory=GuardrailConfig)
    reasoner: str = "rule"
    rule_constants: RuleConstants = field(default_factory=RuleConstants)
    llm_endpoint: EndpointConfig | None = None
    # how agents reach the control surface: in-process or framed TCP
    tool_transport: str = "local"


def _require(d: dict, key: str, where: str):
    if key not in d:
        raise ScenarioError(f"{where}.{key}" if where else key, "required")
    return d[key]


def load_scenario(raw: dict) -> ScenarioConfig:
    """Validate a scenario JSON document into a ScenarioConfig."""
    if not isinstance(raw, dict):
        raise ScenarioError("", "scenario must be a JSON object")
    seed = _require(raw, "seed", "")
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ScenarioError("seed", "must be an integer")
    duration = _require(raw, "duration_s", "")
    if not isinstance(duration, (int, float)) or duration <= 0:
        raise ScenarioError("duration_s", "must be a positive number")
    compression = raw.get("time_compression", 1.0)
    if not isinstance(compression, (int, float)) or compression < 1:
        raise ScenarioError("time_compression", "must be a number >= 1")

    cell_raw = dict(_require(raw, "cell", ""))
    if "prb_rate_table" in cell_raw:
        cell_raw["prb_rate_table"] = tuple(
            (float(t), int(r)) for t, r in cell_raw["prb_rate_table"]
        )
    try:
        cell = CellConfig(**cell_raw)
    except (TypeError, ValueError) as exc:
        raise ScenarioError("cell", str(exc)) from exc

    slices = []
    for i, s in enumerate(_require(raw, "slices", "")):
        try:
            slices.append(SliceConfig(**s))
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"slices[{i}]", str(exc)) from exc
    if not slices:
        raise ScenarioError("slices", "at least one slice required")

    ues = []
    for i, u in enumerate(_require(raw, "ues", "")):
        try:
            ues.append(UeConfig(**u))
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"ues[{i}]", str(exc)) from exc
    if not ues:
        raise ScenarioError("ues", "at least one ue required")

    phases = []
    previous = -1.0
    for i, p in enumerate(_require(raw, "phases", "")):
        start = _require(p, "start_s", f"phases[{i}]")
        body = _require(p, "body_text", f"phases[{i}]")
        if not isinstance(start, (int, float)) or start < 0:
            raise ScenarioError(f"phases[{i}].start_s", "must be a non-negative number")
        if start <= previous:
            raise ScenarioError(f"phases[{i}].start_s", "phase starts must strictly increase")
        if start >= duration:
            raise ScenarioError(f"phases[{i}].start_s", "phase must start before duration_s")
        if not isinstance(body, str) or not body:
            raise ScenarioError(f"phases[{i}].body_text", "must be a non-empty string")
        previous = start
        try:
            requirements = tuple(
                SliceRequirement.from_dict(r) for r in p.get("requirements", [])
            )
        except (KeyError, ValueError) as exc:
            raise ScenarioError(f"phases[{i}].requirements", str(exc)) from exc
        phases.append(
            PhaseSpec(
                start_s=float(start),
                name=p.get("name", f"phase-{i + 1}"),
                body_text=body,
                requirements=requirements,
                domain=p.get("domain"),
            )
        )

    agents_raw = raw.get("agents", {})
    guardrails = GuardrailConfig.from_dict(agents_raw.get("guardrails", {}))
    constants_raw = agents_raw.get("rule_constants", {})
    try:
        constants = RuleConstants(**constants_raw)
    except TypeError as exc:
        raise ScenarioError("agents.rule_constants", str(exc)) from exc
    reasoner = agents_raw.get("reasoner", "rule")
    if reasoner not in ("rule", "llm"):
        raise ScenarioError("agents.reasoner", f"unknown backend {reasoner!r}")
    tool_transport = agents_raw.get("tool_transport", "local")
    if tool_transport not in ("local", "tcp"):
        raise ScenarioError("agents.tool_transport", f"unknown transport {tool_transport!r}")
    endpoint = None
    if "llm_endpoint" in agents_raw:
        try:
            endpoint = EndpointConfig.from_dict(agents_raw["llm_endpoint"])
        except KeyError as exc:
            raise ScenarioError("agents.llm_endpoint", f"missing {exc}") from exc
    if reasoner == "llm" and endpoint is None:
        raise ScenarioError("agents.llm_endpoint", "required for the llm backend")

    return ScenarioConfig(
        seed=seed,
        duration_s=float(duration),
        cell=cell,
        slices=slices,
        ues=ues,
        phases=phases,
        kpi_period_s=float(raw.get("kpi_period_s", 1.0)),
        time_compression=float(compression),
        violation_window_s=float(raw.get("violation_window_s", 10.0)),
        cycle_period_s=float(agents_raw.get("cycle_period_s", 1.0)),
        heartbeat_s=float(agents_raw.get("heartbeat_s", 10.0)),
        max_renegotiations=int(agents_raw.get("max_renegotiations", 3)),
        guardrails=guardrails,
        reasoner=reasoner,
        rule_constants=constants,
        llm_endpoint=endpoint,
        tool_transport=tool_transport,
    )


def load_scenario_file(path: str | Path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return load_scenario(json.load(fh))


@dataclass
class ScenarioResult:
    seed: int
    duration_s: float
    kpi_period_s: float
    phases: list[dict]
    series: dict
    violations: list[dict]
    intent_latency_cycles: dict
    agent_ids: list[str]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "duration_s": self.duration_s,
            "kpi_period_s": self.kpi_period_s,
            "phases": self.phases,
            "series": self.series,
            "violations": self.violations,
            "intent_latency_cycles": self.intent_latency_cycles,
            "agent_ids": self.agent_ids,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


class ScenarioRuntime:
    """Boots sim + fabric + agents + lake and advances them on one clock."""

    def __init__(self, config: ScenarioConfig, out_dir: str | Path,
                 llm_transport=None):
        self.config = config
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.now_s = 0.0

        self.lake = DataLake(self.out_dir / "lake")
        self.lake_writer = BufferingWriter(self.lake)
        self.bus = MessageBus(
            clock=lambda: self.now_s,
            mirrors=[self._mirror_message],
            dead_letter_sink=self._mirror_dead_letter,
        )
        self.sim = UplinkSimulator(config.cell, list(config.slices), list(config.ues),
                                   seed=config.seed)
        self.tool_server = build_control_surface(self.sim, config.kpi_period_s)
        self._tcp_server = None
        self._tcp_client = None
        if config.tool_transport == "tcp":
            self._tcp_server, _ = serve_dispatcher(make_dispatcher(self.tool_server))
            host, port = self._tcp_server.server_address
            self._tcp_client = FrameClient(host, port)
            self.tools = self._tcp_client
        else:
            self.tools = LocalToolClient(self.tool_server)

        if config.reasoner == "llm":
            reasoner = LlmReasoner(config.llm_endpoint, transport=llm_transport)
        else:
            reasoner = RuleBasedReasoner(config.rule_constants)

        slice_infos = [
            SliceInfo(
                slice_id=s.slice_id,
                name=s.name,
                ue_ids=tuple(u.ue_id for u in config.ues if u.slice_id == s.slice_id),
            )
            for s in config.slices
        ]
        self.slice_infos = slice_infos
        context_text = self._context_text()
        clock = lambda: self.now_s  # noqa: E731
        append = self.lake_writer.append

        def agent_config(agent_id, role, parent, cycle=None, heartbeat=None):
            return AgentConfig(
                agent_id=agent_id,
                role=role,
                parent_id=parent,
                cycle_period_s=cycle if cycle is not None else config.cycle_period_s,
                heartbeat_s=heartbeat if heartbeat is not None else config.heartbeat_s,
                guardrails=config.guardrails,
                context_text=context_text,
                max_renegotiations=config.max_renegotiations,
            )

        self.manager = RanManager(
            agent_config("ran-manager", "manager", None, cycle=float("inf"),
                         heartbeat=0.0),
            self.bus,
            layer_agents={"uplink-mac": "l2-manager"},
            lake_append=append,
            clock=clock,
        )
        self.l2 = L2Manager(
            # the L2 manager re-evaluates on messages plus a slow heartbeat
            agent_config("l2-manager", "l2", "ran-manager", cycle=float("inf")),
            self.bus,
            reasoner=reasoner,
            slices=slice_infos,
            children={"pc": "pc-agent", "ra": "ul-ra-agent"},
            lake_append=append,
            clock=clock,
        )
        self.pc = PcAgent(
            agent_config("pc-agent", "pc", "l2-manager"),
            self.bus,
            tools=self.tools,
            reasoner=reasoner,
            slices=slice_infos,
            lake_append=append,
            clock=clock,
            initial_snr_targets={u.ue_id: u.snr_target_db for u in config.ues},
        )
        self.ra = UlRaAgent(
            agent_config("ul-ra-agent", "ra", "l2-manager"),
            self.bus,
            tools=self.tools,
            reasoner=reasoner,
            slices=slice_infos,
            lake_append=append,
            clock=clock,
            initial_throttles={s.slice_id: s.throttle_limit_bps for s in config.slices},
        )
        self.agents = [self.manager, self.l2, self.pc, self.ra]

        self._phase_queue = sorted(config.phases, key=lambda p: p.start_s)
        self._phase_index = 0
        self._injected: list[tuple[Intent, str]] = []  # (intent, phase name)
        self._detectors: list[ViolationDetector] = []
        self._active_detector: ViolationDetector | None = None
        self._intent_seq = 0

        self._csv_path = self.out_dir / "slots.csv"
        self._csv_fh = open(self._csv_path, "w", newline="", encoding="utf-8")
        self._csv = csv.writer(self._csv_fh)
        self._csv.writerow(SLOT_CSV_COLUMNS)

        self._series: dict = {
            "throughput_bps": {s.slice_id: [] for s in config.slices},
            "throttle_bps": {s.slice_id: [] for s in config.slices},
            "tx_power_dbm": {u.ue_id: [] for u in config.ues},
            "snr_db": {u.ue_id: [] for u in config.ues},
            "snr_target_db": {u.ue_id: [] for u in config.ues},
            "power_draw_mw": {u.ue_id: [] for u in config.ues},
        }
        self._kpi_samples: list[dict] = []

        self.lake_writer.append(
            "lifecycle",
            {
                "event": "boot",
                "seed": config.seed,
                # initial control state, so log replay can rebuild the
                # throttle/target step series without the config file
                "initial_throttles": {
                    str(s.slice_id): s.throttle_limit_bps for s in config.slices
                },
                "initial_snr_targets": {
                    str(u.ue_id): u.snr_target_db for u in config.ues
                },
                "ue_slices": {str(u.ue_id): u.slice_id for u in config.ues},
                "kpi_period_s": config.kpi_period_s,
                "slot_duration_s": config.cell.slot_duration_s,
                "prb_rate_table": [list(entry) for entry in config.cell.prb_rate_table],
            },
            0.0,
            None,
        )

    # -- wiring helpers ---------------------------------------------------------

    def _context_text(self) -> str:
        c = self.config
        slices = "; ".join(
            f"slice {s.slice_id} '{s.name}' with devices "
            + ",".join(str(u.ue_id) for u in c.ues if u.slice_id == s.slice_id)
            for s in c.slices
        )
        return (
            f"Single simulated cell, {c.cell.num_prbs} PRBs per "
            f"{c.cell.slot_duration_s * 1e3:g} ms slot. {slices}."
        )

    def _mirror_message(self, msg) -> None:
        self.lake_writer.append("message", msg.to_dict(), self.now_s, msg.sender)

    def _mirror_dead_letter(self, letter) -> None:
        self.lake_writer.append(
            "lifecycle",
            {"event": "dead_letter", "reason": letter.reason,
             "message": letter.message.to_dict()},
            self.now_s,
            None,
        )

    # -- intent handling ----------------------------------------------------------

    def build_intent(self, body_text: str, requirements=(), name: str = "",
                     domain: str | None = None) -> Intent:
        self._intent_seq += 1
        intent_id = f"intent-{self._intent_seq:03d}" + (f"-{name}" if name else "")
        reqs = tuple(requirements)
        if not reqs:
            reqs = tuple(
                parse_requirements(
                    body_text, {s.slice_id: s.name for s in self.slice_infos}
                )
            )
        return Intent(
            intent_id=intent_id,
            issuer="operator",
            body_text=body_text,
            requirements=reqs,
            timestamp_s=self.now_s,
            domain=domain,
        )

    def inject_intent(self, intent: Intent) -> None:
        self.manager.submit_intent(intent)
        detector = ViolationDetector(
            intent.intent_id,
            [r.to_dict() for r in intent.requirements],
            window_s=self.config.violation_window_s,
        )
        self._active_detector = detector if detector.has_quantitative_requirements else None
        if self._active_detector is not None:
            self._detectors.append(detector)

    def _inject_due_phases(self) -> None:
        while (
            self._phase_index < len(self._phase_queue)
            and self._phase_queue[self._phase_index].start_s <= self.now_s + 1e-9
        ):
            phase = self._phase_queue[self._phase_index]
            intent = self.build_intent(
                phase.body_text, phase.requirements, phase.name, phase.domain
            )
            self._injected.append((intent, phase.name))
            self.inject_intent(intent)
            self._phase_index += 1

    # -- the clock ------------------------------------------------------------------

    def _per_second_duties(self) -> None:
        self._inject_due_phases()
        # everyone sees intents before this second's sample is processed
        for agent in self.agents:
            for msg in agent.subscription.drain():
                agent.handle_message(msg, self.now_s)

        if self.sim.slot_index > 0:
            snapshot = self.sim.collect_kpis(self.config.kpi_period_s)
            self.lake_writer.append("kpi", snapshot.to_dict(), self.now_s, None)
            self._kpi_samples.append(snapshot.to_dict())
            self._record_series(snapshot)
            if self._active_detector is not None:
                transitions = self._active_detector.feed_snapshot(
                    snapshot.timestamp_s,
                    {
                        s.slice_id: s.aggregate_throughput_bps
                        for s in snapshot.per_slice
                    },
                )
                for event, report in transitions:
                    self.lake_writer.append(
                        "violation",
                        {"event": "open" if event == "open" else "resolved",
                         "report": report.to_dict()},
                        self.now_s,
                        None,
                    )

        for agent in self.agents:
            agent.run_due(self.now_s)
        self.bus.expire_pending()

    def _record_series(self, snapshot) -> None:
        t = snapshot.timestamp_s
        for s in snapshot.per_slice:
            self._series["throughput_bps"][s.slice_id].append(
                [t, s.aggregate_throughput_bps]
            )
        for u in snapshot.per_ue:
            self._series["tx_power_dbm"][u.ue_id].append([t, u.tx_power_dbm])
            self._series["snr_db"][u.ue_id].append([t, u.snr_db])
            self._series["power_draw_mw"][u.ue_id].append([t, u.power_draw_mw])
        for sid, slice_cfg in self.sim.slices.items():
            self._series["throttle_bps"][sid].append([t, slice_cfg.throttle_limit_bps])
        for ue in self.sim.ues:
            self._series["snr_target_db"][ue.ue_id].append([t, ue.snr_target_db])

    @property
    def slots_per_period(self) -> int:
        return max(
            1, int(round(self.config.kpi_period_s / self.config.cell.slot_duration_s))
        )

    def start(self) -> None:
        """t = 0 pass: intents land before any slot runs."""
        self._per_second_duties()

    def advance_period(self) -> None:
        """One KPI period: step the slots, then run the per-second duties."""
        cfg = self.config
        for _ in range(self.slots_per_period):
            record = self.sim.step_slot()
            self.now_s = record.timestamp_s
            for row in UplinkSimulator.csv_rows(record, cfg.cell.slot_duration_s):
                self._csv.writerow(row)
        self._per_second_duties()

    def run(self) -> ScenarioResult:
        """Drive the whole configured duration and assemble the result."""
        cfg = self.config
        total_periods = int(round(cfg.duration_s / cfg.kpi_period_s))
        self.start()
        for _ in range(total_periods):
            self.advance_period()
        return self.finish()

    def finish(self) -> ScenarioResult:
        self._csv_fh.close()
        result = self._assemble_result()
        (self.out_dir / "result.json").write_text(result.to_json(), encoding="utf-8")
        self.lake_writer.append("lifecycle", {"event": "finished"}, self.now_s, None)
        return result

    def close(self) -> None:
        if not self._csv_fh.closed:
            self._csv_fh.close()
        if self._tcp_client is not None:
            self._tcp_client.close()
        if self._tcp_server is not None:
            self._tcp_server.shutdown()
        self.lake.close()

    # -- result assembly ---------------------------------------------------------------

    def _phase_bounds(self) -> list[dict]:
        out = []
        for i, (intent, name) in enumerate(self._injected):
            end = (
                self._injected[i + 1][0].timestamp_s
                if i + 1 < len(self._injected)
                else self.config.duration_s
            )
            out.append(
                {
                    "name": name,
                    "intent_id": intent.intent_id,
                    "body_text": intent.body_text,
                    "start_s": intent.timestamp_s,
                    "end_s": end,
                    "requirements": [r.to_dict() for r in intent.requirements],
                }
            )
        return out

    def _intent_latencies(self) -> dict:
        """Cycles from injection to the first KPI sample meeting every
        quantitative requirement; null when an intent has none or never
        complied."""
        latencies: dict[str, int | None] = {}
        for i, (intent, _name) in enumerate(self._injected):
            minima = {
                r.slice_id: r.min_throughput_bps
                for r in intent.requirements
                if r.min_throughput_bps
            }
            if not minima:
                latencies[intent.intent_id] = None
                continue
            horizon = (
                self._injected[i + 1][0].timestamp_s
                if i + 1 < len(self._injected)
                else float("inf")
            )
            latency = None
            for sample in self._kpi_samples:
                t = sample["timestamp_s"]
                if t <= intent.timestamp_s or t > horizon:
                    continue
                slice_bps = {
                    s["slice_id"]: s["aggregate_throughput_bps"]
                    for s in sample["per_slice"]
                }
                if all(slice_bps.get(sid, 0.0) >= need for sid, need in minima.items()):
                    latency = int(round((t - intent.timestamp_s) / self.config.kpi_period_s))
                    break
            latencies[intent.intent_id] = latency
        return latencies

    def _assemble_result(self) -> ScenarioResult:
        violations = [r.to_dict() for det in self._detectors for r in det.reports]
        return ScenarioResult(
            seed=self.config.seed,
            duration_s=self.config.duration_s,
            kpi_period_s=self.config.kpi_period_s,
            phases=self._phase_bounds(),
            series=self._series,
            violations=violations,
            intent_latency_cycles=self._intent_latencies(),
            agent_ids=[a.agent_id for a in self.agents],
        )


def run_scenario(config: ScenarioConfig, out_dir: str | Path,
                 llm_transport=None) -> ScenarioResult:
    runtime = ScenarioRuntime(config, out_dir, llm_transport=llm_transport)
    try:
        return runtime.run()
    finally:
        runtime.close()

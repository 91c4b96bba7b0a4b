"""Hand-wired agent test harness: sim + tools + bus + lake + hierarchy."""

from __future__ import annotations

from ranloop.agents import AgentConfig, DlRaStub, L2Manager, PcAgent, RanManager, SliceInfo, UlRaAgent
from ranloop.datalake import DataLake
from ranloop.fabric import MessageBus
from ranloop.gateway import LocalToolClient, build_control_surface
from ranloop.reasoner import RuleBasedReasoner
from ranloop.sim import CellConfig, SliceConfig, UeConfig, UplinkSimulator


class Rig:
    def __init__(self, tmp_path, reasoner=None, ues=None, slices=None,
                 with_dl=False, seed=0, guardrails=None):
        self.clock = [0.0]
        self.cell = CellConfig()
        self.slices_cfg = slices or [SliceConfig(0, "FWA"), SliceConfig(1, "MTC")]
        self.ues_cfg = ues or [
            UeConfig(0, 0, 17.0, 15.0, -2.0, offered_load_bps=4e7, walk_step_db=0.0),
            UeConfig(1, 0, 17.0, 15.0, -2.0, offered_load_bps=4e7, walk_step_db=0.0),
            UeConfig(2, 1, 17.0, 15.0, -2.0, offered_load_bps=4e7, walk_step_db=0.0),
        ]
        self.sim = UplinkSimulator(self.cell, self.slices_cfg, self.ues_cfg, seed=seed)
        self.lake = DataLake(tmp_path / "lake")
        self.bus = MessageBus(
            clock=lambda: self.clock[0],
            mirrors=[lambda m: self.lake.append("message", m.to_dict(),
                                                self.clock[0], m.sender)],
        )
        self.tools = LocalToolClient(build_control_surface(self.sim))
        self.reasoner = reasoner or RuleBasedReasoner()

        slice_infos = [
            SliceInfo(s.slice_id, s.name,
                      tuple(u.ue_id for u in self.ues_cfg if u.slice_id == s.slice_id))
            for s in self.slices_cfg
        ]
        self.slice_infos = slice_infos
        clock = lambda: self.clock[0]  # noqa: E731
        append = self.lake.append
        kwargs = {} if guardrails is None else {"guardrails": guardrails}

        children = {"pc": "pc-agent", "ra": "ul-ra-agent"}
        if with_dl:
            children["dl"] = "dl-ra-agent"

        self.manager = RanManager(
            AgentConfig("ran-manager", "manager", None, cycle_period_s=float("inf"),
                        heartbeat_s=0.0, **kwargs),
            self.bus, layer_agents={"uplink-mac": "l2-manager"},
            lake_append=append, clock=clock,
        )
        self.l2 = L2Manager(
            AgentConfig("l2-manager", "l2", "ran-manager", cycle_period_s=float("inf"),
                        **kwargs),
            self.bus, reasoner=self.reasoner, slices=slice_infos,
            children=children, lake_append=append, clock=clock,
        )
        self.pc = PcAgent(
            AgentConfig("pc-agent", "pc", "l2-manager", **kwargs),
            self.bus, tools=self.tools, reasoner=self.reasoner, slices=slice_infos,
            lake_append=append, clock=clock,
            initial_snr_targets={u.ue_id: u.snr_target_db for u in self.ues_cfg},
        )
        self.ra = UlRaAgent(
            AgentConfig("ul-ra-agent", "ra", "l2-manager", **kwargs),
            self.bus, tools=self.tools, reasoner=self.reasoner, slices=slice_infos,
            lake_append=append, clock=clock,
            initial_throttles={s.slice_id: s.throttle_limit_bps for s in self.slices_cfg},
        )
        self.agents = [self.manager, self.l2, self.pc, self.ra]
        if with_dl:
            self.dl = DlRaStub(
                AgentConfig("dl-ra-agent", "dl", "l2-manager",
                            cycle_period_s=float("inf"), **kwargs),
                self.bus, lake_append=append, clock=clock,
            )
            self.agents.append(self.dl)

    def tick(self, sim_slots: int = 200):
        """One control cycle: advance the sim, bump the clock, step agents."""
        for _ in range(sim_slots):
            self.sim.step_slot()
        self.clock[0] += 1.0
        for agent in self.agents:
            agent.run_due(self.clock[0])

    def deliver(self):
        """Message-only pass (no control cycles)."""
        for agent in self.agents:
            for msg in agent.subscription.drain():
                agent.handle_message(msg, self.clock[0])

    def records(self, kind):
        return [r for r in self.lake.iter_records() if r.kind == kind]

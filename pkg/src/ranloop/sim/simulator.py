"""Deterministic slot-level driver for a single cell's uplink.

Each slot advances in a fixed order: channel walk, SNR measurement, power
control, scheduling, service accounting, traffic arrival. Two simulators
built from the same configuration and seed produce bit-identical
trajectories.
"""

from __future__ import annotations

import random
from typing import NamedTuple

from .errors import SimConfigError
from .power import apply_tpc, compute_tpc, ue_power_draw
from .scheduler import mcs_from_snr, schedule_uplink
from .types import (
    CellConfig,
    KpiSnapshot,
    PerSliceKpi,
    PerUeKpi,
    SliceConfig,
    UeConfig,
    UeState,
)

# Path gain may wander at most this far from its initial value.
WALK_BOUND_DB = 6.0


class UeSlotStats(NamedTuple):
    ue_id: int
    slice_id: int
    prbs: int
    served_bits: int
    snr_db: float
    tx_power_dbm: float
    power_draw_mw: float
    mcs_index: int


class SlotRecord(NamedTuple):
    slot: int
    timestamp_s: float
    per_ue: tuple[UeSlotStats, ...]


SLOT_CSV_COLUMNS = (
    "timestamp_s",
    "ue_id",
    "slice_id",
    "prbs",
    "throughput_bps",
    "snr_db",
    "tx_power_dbm",
    "power_draw_mw",
)


class UplinkSimulator:
    """Owns all cell state; advanced one slot at a time by a single driver."""

    def __init__(
        self,
        cell: CellConfig,
        slices: list[SliceConfig],
        ues: list[UeConfig],
        seed: int,
        history_slots: int = 20_000,
    ):
        if len({s.slice_id for s in slices}) != len(slices):
            raise SimConfigError("duplicate slice_id")
        if len({u.ue_id for u in ues}) != len(ues):
            raise SimConfigError("duplicate ue_id")
        slice_ids = {s.slice_id for s in slices}
        for u in ues:
            if u.slice_id not in slice_ids:
                raise SimConfigError(f"ue {u.ue_id} references unknown slice {u.slice_id}")

        self.cell = cell
        self.slices = {s.slice_id: s for s in slices}
        self._configs = list(ues)
        self.ues: list[UeState] = [u.initial_state() for u in ues]
        self._rng = random.Random(seed)
        self._initial_gain = {u.ue_id: u.path_gain_db for u in ues}
        self._walk_step = {u.ue_id: u.walk_step_db for u in ues}
        self._offered = {u.ue_id: u.offered_load_bps for u in ues}
        self._arrival_credit = {u.ue_id: 0.0 for u in ues}
        self.slot_index = 0
        self._history: list[SlotRecord] = []
        self._history_slots = history_slots

    @property
    def now_s(self) -> float:
        return self.slot_index * self.cell.slot_duration_s

    def set_snr_target(self, ue_id: int, target_db: float) -> float:
        """Apply a per-device power-control target; returns the applied value."""
        ue = self._find_ue(ue_id)
        ue.snr_target_db = float(target_db)
        return ue.snr_target_db

    def set_throttle_limit(self, slice_id: int, limit_bps: float) -> float:
        """Apply a per-slice throttling limit; returns the applied value."""
        if slice_id not in self.slices:
            raise KeyError(f"unknown slice {slice_id}")
        self.slices[slice_id].throttle_limit_bps = float(limit_bps)
        return self.slices[slice_id].throttle_limit_bps

    def set_offered_load(self, ue_id: int, offered_bps: float) -> None:
        self._find_ue(ue_id)  # existence check
        self._offered[ue_id] = float(offered_bps)

    def _find_ue(self, ue_id: int) -> UeState:
        for ue in self.ues:
            if ue.ue_id == ue_id:
                return ue
        raise KeyError(f"unknown ue {ue_id}")

    def step_slot(self) -> SlotRecord:
        cell = self.cell
        dt = cell.slot_duration_s
        rng = self._rng

        # 1. channel update: bounded random walk per UE
        for ue in self.ues:
            step = self._walk_step[ue.ue_id]
            if step > 0:
                g0 = self._initial_gain[ue.ue_id]
                g = ue.path_gain_db + rng.uniform(-step, step)
                g = min(max(g, g0 - WALK_BOUND_DB), g0 + WALK_BOUND_DB)
                ue.path_gain_db = g

        # 2. SNR measured at slot start
        for ue in self.ues:
            ue.snr_db = ue.tx_power_dbm + ue.path_gain_db

        # 3. power control: one command per UE per slot, applied immediately
        #    (takes effect on the next slot's measurement)
        for i, ue in enumerate(self.ues):
            cmd = compute_tpc(ue.snr_db, ue.snr_target_db)
            self.ues[i] = apply_tpc(ue, cmd)

        # 4. scheduling uses this slot's measured SNR
        allocation = dict(
            schedule_uplink(self.ues, list(self.slices.values()), cell)
        )

        # 5. service: drain backlog, update the PF average
        alpha = cell.ewma_alpha
        stats: list[UeSlotStats] = []
        for ue in self.ues:
            prbs = allocation.get(ue.ue_id, 0)
            mcs_index, bits_per_prb = mcs_from_snr(ue.snr_db, cell)
            served = min(prbs * bits_per_prb, ue.backlog_bits)
            ue.backlog_bits -= served
            ue.avg_throughput_bps = (1 - alpha) * ue.avg_throughput_bps + alpha * (
                served / dt
            )
            stats.append(
                UeSlotStats(
                    ue_id=ue.ue_id,
                    slice_id=ue.slice_id,
                    prbs=prbs,
                    served_bits=served,
                    snr_db=ue.snr_db,
                    tx_power_dbm=ue.tx_power_dbm,
                    power_draw_mw=ue_power_draw(
                        ue.tx_power_dbm, cell.power_base_mw, cell.power_coeff_mw
                    ),
                    mcs_index=mcs_index,
                )
            )

        # 6. traffic arrival: constant bit rate with fractional carry
        for ue in self.ues:
            credit = self._arrival_credit[ue.ue_id] + self._offered[ue.ue_id] * dt
            arrived = int(credit)
            self._arrival_credit[ue.ue_id] = credit - arrived
            ue.backlog_bits += arrived

        self.slot_index += 1
        record = SlotRecord(
            slot=self.slot_index,
            timestamp_s=self.slot_index * dt,
            per_ue=tuple(stats),
        )
        self._history.append(record)
        if len(self._history) > self._history_slots:
            del self._history[: len(self._history) - self._history_slots]
        return record

    def collect_kpis(self, window_s: float) -> KpiSnapshot:
        """Aggregate the last window_s of slots into one measurement snapshot.

        Throughput, SNR, power and draw are window means; the MCS index is
        the most recent one. A window longer than the elapsed (retained)
        history is truncated rather than rejected.
        """
        if not self._history:
            raise ValueError("collect_kpis requires at least one elapsed slot")
        dt = self.cell.slot_duration_s
        n = max(1, min(int(round(window_s / dt)), len(self._history)))
        window = self._history[-n:]
        duration = n * dt

        ue_ids = [u.ue_id for u in self.ues]
        bits = {uid: 0 for uid in ue_ids}
        snr_sum = {uid: 0.0 for uid in ue_ids}
        tx_sum = {uid: 0.0 for uid in ue_ids}
        draw_sum = {uid: 0.0 for uid in ue_ids}
        prbs_by_slice = {sid: 0 for sid in self.slices}
        last_mcs = {uid: 0 for uid in ue_ids}

        for rec in window:
            for s in rec.per_ue:
                bits[s.ue_id] += s.served_bits
                snr_sum[s.ue_id] += s.snr_db
                tx_sum[s.ue_id] += s.tx_power_dbm
                draw_sum[s.ue_id] += s.power_draw_mw
                prbs_by_slice[s.slice_id] += s.prbs
                last_mcs[s.ue_id] = s.mcs_index

        per_ue = tuple(
            PerUeKpi(
                ue_id=uid,
                throughput_bps=bits[uid] / duration,
                snr_db=snr_sum[uid] / n,
                tx_power_dbm=tx_sum[uid] / n,
                mcs_index=last_mcs[uid],
                power_draw_mw=draw_sum[uid] / n,
            )
            for uid in ue_ids
        )
        total_prbs = self.cell.num_prbs * n
        per_slice = tuple(
            PerSliceKpi(
                slice_id=sid,
                aggregate_throughput_bps=sum(
                    bits[u.ue_id] for u in self.ues if u.slice_id == sid
                )
                / duration,
                prb_utilization_fraction=prbs_by_slice[sid] / total_prbs,
            )
            for sid in sorted(self.slices)
        )
        return KpiSnapshot(timestamp_s=self.now_s, per_ue=per_ue, per_slice=per_slice)

    @staticmethod
    def csv_rows(record: SlotRecord, slot_duration_s: float):
        """Flatten one slot record into CSV rows (one per UE)."""
        for s in record.per_ue:
            yield (
                record.timestamp_s,
                s.ue_id,
                s.slice_id,
                s.prbs,
                s.served_bits / slot_duration_s,
                s.snr_db,
                s.tx_power_dbm,
                s.power_draw_mw,
            )

"""Log replay: rebuild scenario series and slot-schema CSV from the lake alone.

The KPI records carry measurements; control settings (throttles, SNR targets)
are step functions reconstructed from the boot record plus every decision's
clamped actions. A gateway run and a replay of its lake produce identical
series, which is what makes the log a sufficient audit artifact.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .store import DataLake

CSV_COLUMNS = (
    "timestamp_s",
    "ue_id",
    "slice_id",
    "prbs",
    "throughput_bps",
    "snr_db",
    "tx_power_dbm",
    "power_draw_mw",
)


def _boot_payload(lake: DataLake) -> dict:
    for rec in lake.iter_records():
        if rec.kind == "lifecycle" and rec.payload.get("event") == "boot":
            return rec.payload
    raise ValueError("lake has no boot record; cannot replay control series")


def series_from_lake(lake: DataLake) -> dict:
    """Rebuild the result series dict (same shape as a scenario result).

    Sampling convention matches the runner: the sample at time t reflects
    control settings as they stood before that second's agent cycles, so
    decisions stamped exactly at t take effect from the next sample on.
    """
    boot = _boot_payload(lake)
    throttles = {int(k): float(v) for k, v in boot["initial_throttles"].items()}
    targets = {int(k): float(v) for k, v in boot["initial_snr_targets"].items()}

    series: dict = {
        "throughput_bps": {sid: [] for sid in throttles},
        "throttle_bps": {sid: [] for sid in throttles},
        "tx_power_dbm": {uid: [] for uid in targets},
        "snr_db": {uid: [] for uid in targets},
        "snr_target_db": {uid: [] for uid in targets},
        "power_draw_mw": {uid: [] for uid in targets},
    }

    pending: list = []  # decisions not yet folded into the step functions
    for rec in lake.iter_records():
        if rec.kind == "decision":
            pending.append(rec)
        elif rec.kind == "kpi":
            t = rec.timestamp_s
            still_pending = []
            for decision in pending:
                if decision.timestamp_s < t:
                    for action in decision.payload.get("clamped_actions", []):
                        if action["kind"] == "throttle_limit":
                            throttles[int(action["slice_id"])] = float(action["value"])
                        else:
                            targets[int(action["ue_id"])] = float(action["value"])
                else:
                    still_pending.append(decision)
            pending = still_pending

            for s in rec.payload.get("per_slice", []):
                sid = int(s["slice_id"])
                series["throughput_bps"][sid].append([t, s["aggregate_throughput_bps"]])
                series["throttle_bps"][sid].append([t, throttles[sid]])
            for u in rec.payload.get("per_ue", []):
                uid = int(u["ue_id"])
                series["tx_power_dbm"][uid].append([t, u["tx_power_dbm"]])
                series["snr_db"][uid].append([t, u["snr_db"]])
                series["power_draw_mw"][uid].append([t, u["power_draw_mw"]])
                series["snr_target_db"][uid].append([t, targets[uid]])
    return series


def export_csv(lake: DataLake, out_path: str | Path) -> int:
    """Write per-UE KPI rows in the simulator's slot-record schema.

    Rows are at KPI granularity (one per device per snapshot). The PRB column
    is derived: the mean per-slot count needed to carry the observed
    throughput at the logged MCS, which for a backlogged device equals the
    mean grant.
    """
    boot = _boot_payload(lake)
    slot_s = float(boot.get("slot_duration_s", 0.001))
    ue_slices = {int(k): int(v) for k, v in boot.get("ue_slices", {}).items()}
    rate_table = [int(rate) for _t, rate in boot.get("prb_rate_table", [])] or _rate_table()
    rows = 0
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in lake.iter_records():
            if rec.kind != "kpi":
                continue
            for u in rec.payload.get("per_ue", []):
                uid = int(u["ue_id"])
                bits_per_prb = rate_table[min(int(u["mcs_index"]), len(rate_table) - 1)]
                prbs = (
                    round(u["throughput_bps"] * slot_s / bits_per_prb)
                    if bits_per_prb > 0
                    else 0
                )
                writer.writerow(
                    (
                        rec.timestamp_s,
                        uid,
                        ue_slices.get(uid, -1),
                        prbs,
                        u["throughput_bps"],
                        u["snr_db"],
                        u["tx_power_dbm"],
                        u["power_draw_mw"],
                    )
                )
                rows += 1
    return rows


def _rate_table() -> list[int]:
    from ..sim.types import DEFAULT_PRB_RATE_TABLE

    return [rate for _, rate in DEFAULT_PRB_RATE_TABLE]

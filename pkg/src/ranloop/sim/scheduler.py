"""Throttled proportional-fair uplink scheduling and SNR-to-rate mapping."""

from __future__ import annotations

import math

from .types import CellConfig, SliceConfig, UeState


def mcs_from_snr(snr_db: float, cell: CellConfig) -> tuple[int, int]:
    """Return (mcs_index, bits_per_prb) for the highest table entry whose
    threshold does not exceed snr_db. Thresholds are inclusive; anything
    below the first threshold still gets index 0."""
    table = cell.prb_rate_table
    index = 0
    for i, (threshold, _rate) in enumerate(table):
        if snr_db >= threshold:
            index = i
        else:
            break
    return index, table[index][1]


def schedule_uplink(
    ues: list[UeState],
    slices: list[SliceConfig],
    cell: CellConfig,
) -> list[tuple[int, int]]:
    """Grant PRBs for one slot.

    A UE contends only while it has backlog and its average throughput is
    still below its slice's throttling limit. Contenders are ranked by the
    proportional-fair metric (achievable rate over average throughput) and
    served greedily in rank order, each capped at the PRBs needed to drain
    its backlog this slot. Ties go to the lowest ue_id.
    """
    limits = {s.slice_id: s.throttle_limit_bps for s in slices}
    ranked: list[tuple[float, int, UeState, int]] = []
    for ue in ues:
        if ue.backlog_bits <= 0:
            continue
        limit = limits.get(ue.slice_id)
        if limit is None:
            raise KeyError(f"ue {ue.ue_id} references unknown slice {ue.slice_id}")
        if ue.avg_throughput_bps >= limit:
            continue
        _, bits_per_prb = mcs_from_snr(ue.snr_db, cell)
        if bits_per_prb <= 0:
            continue  # channel too poor to carry anything
        rate_bps = bits_per_prb / cell.slot_duration_s
        metric = rate_bps / max(ue.avg_throughput_bps, 1.0)
        ranked.append((metric, ue.ue_id, ue, bits_per_prb))

    ranked.sort(key=lambda entry: (-entry[0], entry[1]))

    allocation: list[tuple[int, int]] = []
    remaining = cell.num_prbs
    for _metric, ue_id, ue, bits_per_prb in ranked:
        if remaining <= 0:
            break
        needed = math.ceil(ue.backlog_bits / bits_per_prb)
        granted = min(needed, remaining)
        if granted > 0:
            allocation.append((ue_id, granted))
            remaining -= granted
    return allocation

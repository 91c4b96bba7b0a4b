"""Independent reference implementations used to pin expected values.

These stay deliberately dumb: repeated argmax extraction instead of sorting,
explicit loops instead of shared helpers, so they exercise none of the code
paths they check.
"""

from __future__ import annotations

import math


def rate_for_snr(snr_db: float, table) -> int:
    """Reference SNR -> bits/PRB lookup (linear scan from the top)."""
    for threshold, rate in reversed(list(table)):
        if snr_db >= threshold:
            return rate
    return table[0][1]


def pf_allocate(ues, limits, num_prbs, slot_duration_s, table):
    """One slot of throttled proportional-fair allocation by repeated argmax.

    ues: list of dicts with ue_id, slice_id, snr_db, backlog_bits,
    avg_throughput_bps. Returns {ue_id: prbs} for granted UEs only.
    """
    contenders = []
    for ue in ues:
        if ue["backlog_bits"] <= 0:
            continue
        if ue["avg_throughput_bps"] >= limits[ue["slice_id"]]:
            continue
        bits = rate_for_snr(ue["snr_db"], table)
        if bits <= 0:
            continue
        metric = (bits / slot_duration_s) / max(ue["avg_throughput_bps"], 1.0)
        contenders.append({"ue": ue, "bits": bits, "metric": metric})

    grants: dict[int, int] = {}
    remaining = num_prbs
    while contenders and remaining > 0:
        best = None
        for c in contenders:
            if best is None:
                best = c
            elif c["metric"] > best["metric"]:
                best = c
            elif c["metric"] == best["metric"] and c["ue"]["ue_id"] < best["ue"]["ue_id"]:
                best = c
        contenders.remove(best)
        needed = math.ceil(best["ue"]["backlog_bits"] / best["bits"])
        granted = min(needed, remaining)
        if granted > 0:
            grants[best["ue"]["ue_id"]] = granted
            remaining -= granted
    return grants


def tpc_step(err_db: float) -> int:
    """Reference command choice for a target-minus-measured error."""
    if abs(err_db) <= 0.5:
        return 0
    if err_db >= 4.0:
        return 3
    if err_db > 0.5:
        return 1
    return -1


def tpc_slots_to_converge(initial_err_db: float) -> int:
    """Count slots until |err| <= 0.5 under the command policy, static channel."""
    err = initial_err_db
    slots = 0
    while abs(err) > 0.5:
        err -= tpc_step(err)
        slots += 1
        if slots > 1000:
            raise AssertionError("reference TPC loop failed to converge")
    return slots


def solve_power_coeff(delta_mw: float, hi_dbm: float, lo_dbm: float) -> float:
    """Coefficient making draw(hi) - draw(lo) equal delta_mw under the
    base + coeff * 10^(tx/10) model."""
    return delta_mw / (10.0 ** (hi_dbm / 10.0) - 10.0 ** (lo_dbm / 10.0))


def cell_capacity_bps(num_prbs: int, bits_per_prb: int, slot_duration_s: float) -> float:
    return num_prbs * bits_per_prb / slot_duration_s

"""Closed-loop transmit power control and the device power-draw model."""

from __future__ import annotations

from dataclasses import replace

from .types import TpcCommand, UeState, UE_TX_MAX_DBM, UE_TX_MIN_DBM, require_finite

# Decision thresholds, in dB of target-minus-measured error:
# inside +/-0.5 hold, a deficit of 4 or more takes the big +3 step,
# smaller deficits creep up by +1, any surplus steps down by -1.
TPC_DEADBAND_DB = 0.5
TPC_BOOST_THRESHOLD_DB = 4.0


def compute_tpc(snr_db: float, snr_target_db: float) -> TpcCommand:
    """Map the current SNR error onto the {-1, 0, +1, +3} command alphabet."""
    require_finite("snr_db", snr_db)
    require_finite("snr_target_db", snr_target_db)
    err = snr_target_db - snr_db
    if abs(err) <= TPC_DEADBAND_DB:
        return TpcCommand(0)
    if err >= TPC_BOOST_THRESHOLD_DB:
        return TpcCommand(3)
    if err > TPC_DEADBAND_DB:
        return TpcCommand(1)
    return TpcCommand(-1)


def apply_tpc(ue: UeState, cmd: TpcCommand) -> UeState:
    """Return a copy of ue with its transmit power stepped and clamped to the
    device range; every other field is untouched."""
    new_power = ue.tx_power_dbm + cmd.value
    new_power = min(max(new_power, UE_TX_MIN_DBM), UE_TX_MAX_DBM)
    return replace(ue, tx_power_dbm=new_power)


def ue_power_draw(
    tx_power_dbm: float,
    base_mw: float = 2000.0,
    coeff_mw: float = 2.22,
) -> float:
    """Device draw in mW: a constant floor plus a term linear in radiated power.

    The default coefficient makes the 20 dBm -> 10 dBm transition worth
    roughly 200 mW.
    """
    if not UE_TX_MIN_DBM <= tx_power_dbm <= UE_TX_MAX_DBM:
        raise ValueError(f"tx_power_dbm {tx_power_dbm} outside device range")
    return base_mw + coeff_mw * 10.0 ** (tx_power_dbm / 10.0)

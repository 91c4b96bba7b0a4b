"""Domain types for the slot-level uplink simulator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import SimConfigError

# Device transmit power limits (power class 3 handset ceiling).
UE_TX_MIN_DBM = -40.0
UE_TX_MAX_DBM = 23.0

# Allowed per-slot power adjustment commands, in dB.
TPC_ALPHABET = (-1, 0, 1, 3)

THROTTLE_MIN_BPS = 3e6
THROTTLE_MAX_BPS = 1e8

# Default CQI-like rate table: (snr_threshold_db, bits_per_prb_per_slot).
# Thresholds are inclusive lower edges; an SNR below the first threshold
# still selects index 0. Sized so that a full 50-PRB cell at the 14 dB
# entry carries 60 Mbit/s with 1 ms slots.
DEFAULT_PRB_RATE_TABLE: tuple[tuple[float, int], ...] = (
    (-8.0, 48),
    (-6.0, 78),
    (-4.0, 126),
    (-2.0, 202),
    (0.0, 294),
    (2.0, 394),
    (4.0, 496),
    (6.0, 642),
    (8.0, 808),
    (10.0, 916),
    (12.0, 1050),
    (14.0, 1200),
    (16.0, 1420),
    (18.0, 1620),
    (20.0, 1800),
)


@dataclass
class UeState:
    """Mutable per-device state advanced by the simulator.

    snr_db is refreshed from tx_power_dbm + path_gain_db each slot; between
    refreshes it holds the value measured at the start of the current slot.
    """

    ue_id: int
    slice_id: int
    tx_power_dbm: float
    snr_db: float
    snr_target_db: float
    backlog_bits: int
    avg_throughput_bps: float
    path_gain_db: float

    def __post_init__(self) -> None:
        if not UE_TX_MIN_DBM <= self.tx_power_dbm <= UE_TX_MAX_DBM:
            raise SimConfigError(
                f"ue {self.ue_id}: tx_power_dbm {self.tx_power_dbm} outside "
                f"[{UE_TX_MIN_DBM}, {UE_TX_MAX_DBM}]"
            )
        if self.backlog_bits < 0:
            raise SimConfigError(f"ue {self.ue_id}: negative backlog")
        if self.avg_throughput_bps < 0:
            raise SimConfigError(f"ue {self.ue_id}: negative avg throughput")


@dataclass(frozen=True)
class UeConfig:
    """Scenario-level description of one device: initial state plus traffic."""

    ue_id: int
    slice_id: int
    tx_power_dbm: float
    snr_target_db: float
    path_gain_db: float
    offered_load_bps: float = 0.0
    backlog_bits: int = 0
    avg_throughput_bps: float = 0.0
    # Half-width of the per-slot uniform path-gain walk; 0 freezes the channel.
    walk_step_db: float = 0.1

    def __post_init__(self) -> None:
        if not UE_TX_MIN_DBM <= self.tx_power_dbm <= UE_TX_MAX_DBM:
            raise SimConfigError(
                f"ue {self.ue_id}: tx_power_dbm {self.tx_power_dbm} outside "
                f"[{UE_TX_MIN_DBM}, {UE_TX_MAX_DBM}]"
            )
        if self.offered_load_bps < 0:
            raise SimConfigError(f"ue {self.ue_id}: negative offered load")
        if self.backlog_bits < 0:
            raise SimConfigError(f"ue {self.ue_id}: negative backlog")
        if self.walk_step_db < 0:
            raise SimConfigError(f"ue {self.ue_id}: negative walk step")

    def initial_state(self) -> UeState:
        return UeState(
            ue_id=self.ue_id,
            slice_id=self.slice_id,
            tx_power_dbm=self.tx_power_dbm,
            snr_db=self.tx_power_dbm + self.path_gain_db,
            snr_target_db=self.snr_target_db,
            backlog_bits=self.backlog_bits,
            avg_throughput_bps=self.avg_throughput_bps,
            path_gain_db=self.path_gain_db,
        )


@dataclass
class SliceConfig:
    """A class of users sharing a throttling limit and a priority weight."""

    slice_id: int
    name: str
    throttle_limit_bps: float = THROTTLE_MAX_BPS
    priority_weight: float = 1.0

    def __post_init__(self) -> None:
        if not THROTTLE_MIN_BPS <= self.throttle_limit_bps <= THROTTLE_MAX_BPS:
            raise SimConfigError(
                f"slice {self.slice_id}: throttle_limit_bps {self.throttle_limit_bps} "
                f"outside [{THROTTLE_MIN_BPS}, {THROTTLE_MAX_BPS}]"
            )
        if self.priority_weight <= 0:
            raise SimConfigError(f"slice {self.slice_id}: priority_weight must be > 0")


@dataclass(frozen=True)
class CellConfig:
    num_prbs: int = 50
    slot_duration_s: float = 0.001
    prb_rate_table: tuple[tuple[float, int], ...] = DEFAULT_PRB_RATE_TABLE
    ewma_alpha: float = 0.01
    # Device power model: draw = power_base_mw + power_coeff_mw * 10^(tx_dbm/10).
    # The coefficient is calibrated so a 20 dBm -> 10 dBm step saves ~200 mW.
    power_base_mw: float = 2000.0
    power_coeff_mw: float = 2.22

    def __post_init__(self) -> None:
        if self.num_prbs <= 0:
            raise SimConfigError("num_prbs must be positive")
        if self.slot_duration_s <= 0:
            raise SimConfigError("slot_duration_s must be positive")
        if not 0 < self.ewma_alpha <= 1:
            raise SimConfigError("ewma_alpha must be in (0, 1]")
        if not self.prb_rate_table:
            raise SimConfigError("prb_rate_table must not be empty")
        thresholds = [t for t, _ in self.prb_rate_table]
        rates = [r for _, r in self.prb_rate_table]
        if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise SimConfigError("prb_rate_table thresholds must be strictly increasing")
        if any(b < a for a, b in zip(rates, rates[1:])):
            raise SimConfigError("prb_rate_table rates must be non-decreasing")
        if any(r < 0 for r in rates):
            raise SimConfigError("prb_rate_table rates must be non-negative")


@dataclass(frozen=True)
class TpcCommand:
    """One power-adjustment step from the four-command alphabet."""

    value: int

    def __post_init__(self) -> None:
        if self.value not in TPC_ALPHABET:
            raise SimConfigError(f"TPC value {self.value} not in {TPC_ALPHABET}")


@dataclass(frozen=True)
class PerUeKpi:
    ue_id: int
    throughput_bps: float
    snr_db: float
    tx_power_dbm: float
    mcs_index: int
    power_draw_mw: float


@dataclass(frozen=True)
class PerSliceKpi:
    slice_id: int
    aggregate_throughput_bps: float
    prb_utilization_fraction: float


@dataclass(frozen=True)
class KpiSnapshot:
    timestamp_s: float
    per_ue: tuple[PerUeKpi, ...]
    per_slice: tuple[PerSliceKpi, ...]

    def to_dict(self) -> dict:
        return {
            "timestamp_s": self.timestamp_s,
            "per_ue": [
                {
                    "ue_id": u.ue_id,
                    "throughput_bps": u.throughput_bps,
                    "snr_db": u.snr_db,
                    "tx_power_dbm": u.tx_power_dbm,
                    "mcs_index": u.mcs_index,
                    "power_draw_mw": u.power_draw_mw,
                }
                for u in self.per_ue
            ],
            "per_slice": [
                {
                    "slice_id": s.slice_id,
                    "aggregate_throughput_bps": s.aggregate_throughput_bps,
                    "prb_utilization_fraction": s.prb_utilization_fraction,
                }
                for s in self.per_slice
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KpiSnapshot":
        return cls(
            timestamp_s=float(d["timestamp_s"]),
            per_ue=tuple(
                PerUeKpi(
                    ue_id=int(u["ue_id"]),
                    throughput_bps=float(u["throughput_bps"]),
                    snr_db=float(u["snr_db"]),
                    tx_power_dbm=float(u["tx_power_dbm"]),
                    mcs_index=int(u["mcs_index"]),
                    power_draw_mw=float(u["power_draw_mw"]),
                )
                for u in d["per_ue"]
            ),
            per_slice=tuple(
                PerSliceKpi(
                    slice_id=int(s["slice_id"]),
                    aggregate_throughput_bps=float(s["aggregate_throughput_bps"]),
                    prb_utilization_fraction=float(s["prb_utilization_fraction"]),
                )
                for s in d["per_slice"]
            ),
        )


def require_finite(name: str, value: float) -> float:
    if not math.isfinite(value):
        from .errors import InvalidMeasurementError

        raise InvalidMeasurementError(f"{name} is not finite: {value!r}")
    return value

from .types import (
    CellConfig,
    KpiSnapshot,
    PerSliceKpi,
    PerUeKpi,
    SliceConfig,
    TpcCommand,
    UeConfig,
    UeState,
    DEFAULT_PRB_RATE_TABLE,
    UE_TX_MAX_DBM,
    UE_TX_MIN_DBM,
)
from .errors import InvalidMeasurementError, SimConfigError
from .scheduler import mcs_from_snr, schedule_uplink
from .power import apply_tpc, compute_tpc, ue_power_draw
from .simulator import SlotRecord, UeSlotStats, UplinkSimulator, SLOT_CSV_COLUMNS

__all__ = [
    "CellConfig",
    "KpiSnapshot",
    "PerSliceKpi",
    "PerUeKpi",
    "SliceConfig",
    "TpcCommand",
    "UeConfig",
    "UeState",
    "DEFAULT_PRB_RATE_TABLE",
    "UE_TX_MAX_DBM",
    "UE_TX_MIN_DBM",
    "InvalidMeasurementError",
    "SimConfigError",
    "mcs_from_snr",
    "schedule_uplink",
    "apply_tpc",
    "compute_tpc",
    "ue_power_draw",
    "SlotRecord",
    "UeSlotStats",
    "UplinkSimulator",
    "SLOT_CSV_COLUMNS",
]

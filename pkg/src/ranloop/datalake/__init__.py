from .store import BufferingWriter, DataLake, LogRecord, RECORD_KINDS
from .analytics import (
    BehaviorSummary,
    ViolationDetector,
    ViolationReport,
    detect_violations,
    summarize_agent_behavior,
)
from .replay import export_csv, series_from_lake

__all__ = [
    "BufferingWriter",
    "DataLake",
    "LogRecord",
    "RECORD_KINDS",
    "BehaviorSummary",
    "ViolationDetector",
    "ViolationReport",
    "detect_violations",
    "summarize_agent_behavior",
    "export_csv",
    "series_from_lake",
]

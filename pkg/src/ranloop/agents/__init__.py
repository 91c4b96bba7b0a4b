from .types import (
    ContextReport,
    ControlAction,
    DecisionRecord,
    GuardrailConfig,
    Intent,
    KpiWindow,
    SliceRequirement,
    SubIntent,
    WindowOrderingError,
    update_kpi_window,
)
from .guardrails import GuardrailViolation, apply_guardrails
from .base import AgentConfig, BaseAgent, SliceInfo
from .domain import PcAgent, UlRaAgent, DlRaStub
from .l2 import L2Manager
from .manager import RanManager, RoutingError

__all__ = [
    "ContextReport",
    "ControlAction",
    "DecisionRecord",
    "GuardrailConfig",
    "Intent",
    "KpiWindow",
    "SliceRequirement",
    "SubIntent",
    "WindowOrderingError",
    "update_kpi_window",
    "GuardrailViolation",
    "apply_guardrails",
    "AgentConfig",
    "BaseAgent",
    "SliceInfo",
    "PcAgent",
    "UlRaAgent",
    "DlRaStub",
    "L2Manager",
    "RanManager",
    "RoutingError",
]

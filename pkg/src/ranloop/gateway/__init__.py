from .dapp import LocalToolClient, build_control_surface
from .scenario import (
    PhaseSpec,
    ScenarioConfig,
    ScenarioError,
    ScenarioResult,
    load_scenario,
    run_scenario,
)
from .plots import export_plots

__all__ = [
    "LocalToolClient",
    "build_control_surface",
    "PhaseSpec",
    "ScenarioConfig",
    "ScenarioError",
    "ScenarioResult",
    "load_scenario",
    "run_scenario",
    "export_plots",
]

"""Real-time control surface: the simulator's functions exposed as tools.

This is the integration point agents discover and call; swapping the
simulator for other equipment means re-implementing exactly these three
handlers.
"""

from __future__ import annotations

from ..fabric.tools import ParamSpec, ToolDescriptor, ToolServer
from ..sim.simulator import UplinkSimulator

SNR_TOOL_BOUNDS = (-40.0, 40.0)
THROTTLE_TOOL_BOUNDS = (3e6, 1e8)


def build_control_surface(sim: UplinkSimulator, kpi_window_default_s: float = 1.0) -> ToolServer:
    server = ToolServer("cell-dapp")
    server.register_tool(
        ToolDescriptor(
            "set_snr_target",
            "Set the power-control SNR target for one device; the per-slot "
            "loop steps its transmit power toward this level.",
            {
                "ue_id": ParamSpec("integer", description="device identifier"),
                "target_db": ParamSpec(
                    "number",
                    minimum=SNR_TOOL_BOUNDS[0],
                    maximum=SNR_TOOL_BOUNDS[1],
                    description="desired received SNR in dB",
                ),
            },
        ),
        lambda ue_id, target_db: {
            "ue_id": ue_id,
            "applied_db": sim.set_snr_target(ue_id, target_db),
        },
    )
    server.register_tool(
        ToolDescriptor(
            "set_throttle_limit",
            "Set the per-UE throughput cap shared by every device in a slice.",
            {
                "slice_id": ParamSpec("integer", description="slice identifier"),
                "limit_bps": ParamSpec(
                    "number",
                    minimum=THROTTLE_TOOL_BOUNDS[0],
                    maximum=THROTTLE_TOOL_BOUNDS[1],
                    description="maximum sustained throughput in bit/s",
                ),
            },
        ),
        lambda slice_id, limit_bps: {
            "slice_id": slice_id,
            "applied_bps": sim.set_throttle_limit(slice_id, limit_bps),
        },
    )
    server.register_tool(
        ToolDescriptor(
            "get_kpis",
            "Fetch a measurement snapshot aggregated over the trailing window.",
            {
                "window_s": ParamSpec(
                    "number", required=False, minimum=0.0,
                    description="aggregation window in seconds",
                )
            },
        ),
        lambda window_s=kpi_window_default_s: sim.collect_kpis(window_s).to_dict(),
    )
    return server


class LocalToolClient:
    """In-process tool invocation with the same surface as the TCP client."""

    def __init__(self, server: ToolServer):
        self._server = server

    def list_tools(self) -> list[dict]:
        return [d.to_dict() for d in self._server.list_tools()]

    def call_tool(self, name: str, **arguments):
        return self._server.call_tool(name, arguments)

"""Intent-driven closed-loop uplink control sandbox.

Subpackages:
    sim       slot-level single-cell uplink simulator (scheduler, power control, KPIs)
    fabric    JSON-RPC 2.0 wire protocol: tool registry, agent bus, TCP framing
    agents    the agent hierarchy (manager, L2, power control, resource allocation)
    reasoner  pluggable decision backends (deterministic rules / remote chat endpoint)
    datalake  append-only NDJSON log plus violation detection and behavior reports
    gateway   scenario runner, HTTP/WebSocket service, plots, CLI
"""

__version__ = "0.1.0"

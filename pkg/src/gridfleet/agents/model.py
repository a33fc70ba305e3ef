"""Agent-facing aliases for the shared domain records."""

from ..orders import (
    ORCHESTRATOR_ALIAS,
    AgentSpec,
    TransportOrder,
    TransportTask,
    orders_from_scenario,
    roster_from_scenario,
)

__all__ = [
    "ORCHESTRATOR_ALIAS",
    "AgentSpec",
    "TransportOrder",
    "TransportTask",
    "orders_from_scenario",
    "roster_from_scenario",
]

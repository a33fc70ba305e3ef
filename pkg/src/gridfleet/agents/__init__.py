"""Agent behaviors: orchestrator, carrier-depot, truck and customer."""

from .base import AgentContext, Behavior, ProtocolSettings
from .customer import CustomerBehavior
from .depot import DepotBehavior
from .model import (
    ORCHESTRATOR_ALIAS,
    AgentSpec,
    TransportOrder,
    TransportTask,
    orders_from_scenario,
    roster_from_scenario,
)
from .orchestrator import IncompleteRun, OrchestratorBehavior
from .protocol import explain_transcript, project_truck_transcript, transcript_conforms
from .truck import TruckBehavior

__all__ = [
    "AgentContext",
    "AgentSpec",
    "Behavior",
    "CustomerBehavior",
    "DepotBehavior",
    "IncompleteRun",
    "ORCHESTRATOR_ALIAS",
    "OrchestratorBehavior",
    "ProtocolSettings",
    "TransportOrder",
    "TransportTask",
    "TruckBehavior",
    "explain_transcript",
    "orders_from_scenario",
    "project_truck_transcript",
    "roster_from_scenario",
    "transcript_conforms",
]

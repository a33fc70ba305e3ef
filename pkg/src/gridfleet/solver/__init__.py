"""Routing core: exact and heuristic solvers over grid-world instances."""

from .exact import solve_exact
from .heuristic import solve_heuristic
from .model import (
    BASELINE,
    COLLABORATIVE,
    FleetTruck,
    Infeasible,
    Instance,
    InstanceTooLarge,
    Plan,
    SolverError,
    SynergyUndefined,
    Tour,
    synergy,
)

__all__ = [
    "BASELINE",
    "COLLABORATIVE",
    "FleetTruck",
    "Infeasible",
    "Instance",
    "InstanceTooLarge",
    "Plan",
    "SolverError",
    "SynergyUndefined",
    "Tour",
    "solve_exact",
    "solve_heuristic",
    "synergy",
]

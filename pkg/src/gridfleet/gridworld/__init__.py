"""Grid map, truck motion and scenario files."""

from .grid import (
    Coord,
    GridMap,
    InvalidRouteError,
    MarkerId,
    NoPathError,
    UnknownEdgeError,
    build_map,
    coord_to_marker,
    full_grid,
    marker_to_coord,
    normalize_edge,
)
from .scenario import Scenario, ScenarioError, load_scenario, parse_scenario
from .world import SegmentViolation, TruckPhase, TruckState, World, WorldEvent

__all__ = [
    "Coord",
    "GridMap",
    "InvalidRouteError",
    "MarkerId",
    "NoPathError",
    "Scenario",
    "ScenarioError",
    "SegmentViolation",
    "TruckPhase",
    "TruckState",
    "UnknownEdgeError",
    "World",
    "WorldEvent",
    "build_map",
    "coord_to_marker",
    "full_grid",
    "load_scenario",
    "marker_to_coord",
    "normalize_edge",
    "parse_scenario",
]

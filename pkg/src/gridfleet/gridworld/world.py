"""Discrete-time world state: truck motion, service stops and single-track
segment occupancy, advanced one tick at a time by a single writer.

The world is purely mechanical: agents decide *what* to do (enter an edge,
start serving, change phase) and the tick loop advances whatever is in
progress, emitting events when something finishes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .grid import EdgePair, GridMap, MarkerId, normalize_edge


class WorldError(Exception):
    pass


class PhaseError(WorldError):
    pass


class SegmentViolation(WorldError):
    pass


class TruckPhase(str, Enum):
    PARKED = "parked"
    EN_ROUTE = "en_route"
    SERVING = "serving"
    RETURNING = "returning"
    DONE = "done"


# Legal lifecycle moves for a truck. Degenerate tasks may skip straight from
# parked to returning/done (empty tour, no motion).
_ALLOWED_TRANSITIONS: frozenset[tuple[TruckPhase, TruckPhase]] = frozenset(
    {
        (TruckPhase.PARKED, TruckPhase.EN_ROUTE),
        (TruckPhase.PARKED, TruckPhase.RETURNING),
        (TruckPhase.PARKED, TruckPhase.DONE),
        (TruckPhase.EN_ROUTE, TruckPhase.SERVING),
        (TruckPhase.EN_ROUTE, TruckPhase.RETURNING),
        (TruckPhase.SERVING, TruckPhase.EN_ROUTE),
        (TruckPhase.SERVING, TruckPhase.RETURNING),
        (TruckPhase.RETURNING, TruckPhase.DONE),
    }
)


@dataclass
class TruckState:
    alias: str
    at: MarkerId
    phase: TruckPhase = TruckPhase.PARKED
    target: MarkerId | None = None
    ticks_remaining: int = 0
    service_remaining: int = 0
    route: list[MarkerId] = field(default_factory=list)
    cargo: int = 0

    @property
    def traversing(self) -> tuple[EdgePair, int] | None:
        if self.target is None:
            return None
        return normalize_edge(self.at, self.target), self.ticks_remaining

    def view(self) -> dict:
        return {
            "alias": self.alias,
            "at": self.at,
            "phase": self.phase.value,
            "target": self.target,
            "route": list(self.route),
            "cargo": self.cargo,
        }


@dataclass(frozen=True)
class WorldEvent:
    kind: str  # arrived_at_node | service_complete
    truck: str
    marker: MarkerId
    tick: int

    def view(self) -> dict:
        return {"kind": self.kind, "truck": self.truck, "marker": self.marker, "tick": self.tick}


class World:
    """Single-writer simulation state for one run."""

    def __init__(self, grid: GridMap, edge_ticks: int = 1, service_ticks: int = 2):
        if edge_ticks < 1:
            raise ValueError("edge_ticks must be >= 1")
        if service_ticks < 1:
            raise ValueError("service_ticks must be >= 1")
        self.grid = grid
        self.edge_ticks = edge_ticks
        self.service_ticks = service_ticks
        self.tick_no = 0
        self.trucks: dict[str, TruckState] = {}
        self.segment_holders: dict[str, str] = {}
        self._completed = False

    # -- setup -------------------------------------------------------------

    def add_truck(self, alias: str, at: MarkerId) -> TruckState:
        if alias in self.trucks:
            raise WorldError(f"truck {alias} already exists")
        if not self.grid.has_marker(at):
            raise ValueError(f"marker {at} outside the map")
        state = TruckState(alias=alias, at=at)
        self.trucks[alias] = state
        return state

    def truck(self, alias: str) -> TruckState:
        return self.trucks[alias]

    # -- lifecycle ---------------------------------------------------------

    @property
    def completed(self) -> bool:
        return self._completed

    def mark_completed(self) -> None:
        self._completed = True

    def set_phase(self, alias: str, phase: TruckPhase) -> None:
        state = self.trucks[alias]
        if state.phase == phase:
            return
        if (state.phase, phase) not in _ALLOWED_TRANSITIONS:
            raise PhaseError(f"{alias}: illegal phase change {state.phase.value} -> {phase.value}")
        state.phase = phase

    # -- segment claims ----------------------------------------------------

    def segment_holder(self, segment: str) -> str | None:
        return self.segment_holders.get(segment)

    def claim_segment(self, alias: str, segment: str) -> bool:
        """Grant the single-track segment to the truck iff nobody else holds it.

        Re-claiming a segment already held by the same truck is granted
        (a truck keeps its claim across consecutive segment edges).
        """
        if segment not in self.grid.segments:
            raise WorldError(f"unknown segment {segment}")
        holder = self.segment_holders.get(segment)
        if holder is None:
            self.segment_holders[segment] = alias
            return True
        return holder == alias

    def release_segment(self, alias: str, segment: str) -> None:
        if self.segment_holders.get(segment) == alias:
            del self.segment_holders[segment]

    def occupied_segments(self) -> dict[str, list[str]]:
        """Segments actually occupied by a traversing truck, with occupants."""
        occupancy: dict[str, list[str]] = {}
        for alias in sorted(self.trucks):
            state = self.trucks[alias]
            if state.target is None:
                continue
            seg = self.grid.segment_of(state.at, state.target)
            if seg is not None:
                occupancy.setdefault(seg, []).append(alias)
        return occupancy

    # -- motion commands (invoked by agents via the engine) -----------------

    def begin_edge(self, alias: str, target: MarkerId) -> None:
        state = self.trucks[alias]
        if state.target is not None:
            raise WorldError(f"{alias} is already traversing an edge")
        if not self.grid.has_edge(state.at, target):
            raise WorldError(f"{alias}: no road edge {state.at}->{target}")
        seg = self.grid.segment_of(state.at, target)
        if seg is not None and self.segment_holders.get(seg) != alias:
            raise SegmentViolation(f"{alias} entered single-track {seg} without holding it")
        state.target = target
        state.ticks_remaining = self.edge_ticks

    def begin_service(self, alias: str) -> None:
        state = self.trucks[alias]
        if state.target is not None:
            raise WorldError(f"{alias} cannot serve while moving")
        self.set_phase(alias, TruckPhase.SERVING)
        state.service_remaining = self.service_ticks

    # -- time --------------------------------------------------------------

    def tick(self) -> list[WorldEvent]:
        """Advance one tick; returns finish events in ascending truck alias order."""
        if self._completed:
            return []
        self.tick_no += 1
        events: list[WorldEvent] = []
        for alias in sorted(self.trucks):
            state = self.trucks[alias]
            if state.target is not None:
                state.ticks_remaining -= 1
                if state.ticks_remaining <= 0:
                    state.at = state.target
                    state.target = None
                    state.ticks_remaining = 0
                    events.append(WorldEvent("arrived_at_node", alias, state.at, self.tick_no))
            elif state.phase is TruckPhase.SERVING and state.service_remaining > 0:
                state.service_remaining -= 1
                if state.service_remaining == 0:
                    events.append(WorldEvent("service_complete", alias, state.at, self.tick_no))
        return events

    # -- observation -------------------------------------------------------

    def view(self) -> dict:
        return {
            "tick": self.tick_no,
            "completed": self._completed,
            "trucks": {alias: self.trucks[alias].view() for alias in sorted(self.trucks)},
            "segment_holders": dict(sorted(self.segment_holders.items())),
        }

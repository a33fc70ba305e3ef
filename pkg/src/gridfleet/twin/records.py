"""Run records and the event-sourced state model.

A run's history is a sequence of EventFrames with strictly increasing seq
numbers. Folding the frame log over the scenario's initial state yields
the state snapshot at any point; the live view and any replay go through
the same fold, so the log is the single source of truth.
"""

from __future__ import annotations

import json
from typing import Iterable

from pydantic import BaseModel, ConfigDict

from ..gridworld.scenario import Scenario

CONFIGURED = "configured"
RUNNING = "running"
COMPLETED = "completed"
FAILED = "failed"

_STATUS_ORDER = [CONFIGURED, RUNNING, COMPLETED, FAILED]

FRAME_KINDS = frozenset(
    {"truck_moved", "message_sent", "delivery_completed", "milestone", "run_completed"}
)


class EventFrame(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seq: int
    tick: int
    kind: str
    payload: dict

    def canonical(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "EventFrame":
        return cls.model_validate(json.loads(text))


def status_may_advance(current: str, target: str) -> bool:
    """Run status only moves forward: configured -> running -> terminal."""
    if current == target:
        return True
    if current in (COMPLETED, FAILED):
        return False
    return _STATUS_ORDER.index(target) > _STATUS_ORDER.index(current)


def initial_snapshot(scenario: Scenario) -> dict:
    trucks = {}
    for depot in scenario.depots:
        for truck in depot.trucks:
            trucks[truck.alias] = {
                "at": depot.marker,
                "phase": "parked",
                "cargo": 0,
            }
    return {
        "seq": 0,
        "tick": 0,
        "status": CONFIGURED,
        "trucks": {alias: trucks[alias] for alias in sorted(trucks)},
        "deliveries": [],
        "milestones": [],
        "message_count": 0,
        "reduction": None,
    }


def apply_frame(snapshot: dict, frame: EventFrame) -> dict:
    """Fold one frame into a snapshot (mutates and returns it)."""
    snapshot["seq"] = frame.seq
    snapshot["tick"] = frame.tick
    if snapshot["status"] == CONFIGURED:
        snapshot["status"] = RUNNING
    if frame.kind == "truck_moved":
        entry = snapshot["trucks"][frame.payload["truck"]]
        entry["at"] = frame.payload["at"]
        entry["phase"] = frame.payload["phase"]
        entry["cargo"] = frame.payload.get("cargo", entry["cargo"])
    elif frame.kind == "message_sent":
        snapshot["message_count"] += 1
    elif frame.kind == "delivery_completed":
        snapshot["deliveries"].append(
            {
                "order_id": frame.payload["order_id"],
                "customer": frame.payload["customer"],
                "truck": frame.payload["truck"],
                "marker": frame.payload["marker"],
                "tick": frame.tick,
            }
        )
    elif frame.kind == "milestone":
        snapshot["milestones"].append(frame.payload["text"])
    elif frame.kind == "run_completed":
        snapshot["status"] = frame.payload.get("status", COMPLETED)
        snapshot["reduction"] = frame.payload.get("reduction")
    return snapshot


def fold_frames(scenario: Scenario, frames: Iterable[EventFrame]) -> dict:
    snapshot = initial_snapshot(scenario)
    for frame in frames:
        apply_frame(snapshot, frame)
    return snapshot


def plan_view(plan) -> dict:
    """JSON-friendly projection of a solver plan."""
    return {
        "total_blocks": plan.total_blocks,
        "tours": {
            alias: {
                "route": list(tour.route),
                "stops": [[marker, order_id] for marker, order_id in tour.stops],
                "blocks": tour.blocks,
            }
            for alias, tour in sorted(plan.tours.items())
        },
    }

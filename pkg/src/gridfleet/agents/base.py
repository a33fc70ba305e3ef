"""Behavior plumbing shared by all agent kinds.

A behavior is a sequential, transport-agnostic state machine. It reacts to
envelopes, world events and clock ticks through an AgentContext, which is
the only thing that differs between the deterministic in-process runtime
and the networked one: the protocol logic below the context is identical.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..gridworld.grid import GridMap
from ..gridworld.world import TruckPhase, WorldEvent
from ..messaging.envelope import Envelope
from .model import AgentSpec


@dataclass
class ProtocolSettings:
    """Timing knobs for the confirmation protocol.

    ``confirm_timeout_ticks`` of None waits forever (the simulated-clock
    default); networked runs use a wall-clock transport timeout instead.
    A truck re-sends an unanswered arrival notice up to
    ``confirm_retry_limit`` times before flagging the stop as failed.
    """

    confirm_timeout_ticks: int | None = None
    confirm_retry_limit: int = 3


class AgentContext:
    """Capabilities handed to a behavior by its runtime."""

    alias: str
    settings: ProtocolSettings

    def now(self) -> int:
        raise NotImplementedError

    # messaging
    def request(self, to: str, msg_type: str, payload: dict) -> str:
        """Fire a request; the reply arrives later via on_message."""
        raise NotImplementedError

    def inform(
        self, to: str, msg_type: str, payload: dict, correlation_id: str | None = None
    ) -> None:
        raise NotImplementedError

    def reply(self, original: Envelope, performative: str, msg_type: str, payload: dict) -> None:
        raise NotImplementedError

    # world access (trucks only)
    def grid(self) -> GridMap:
        raise NotImplementedError

    def truck_position(self) -> int:
        raise NotImplementedError

    def is_traversing(self) -> bool:
        raise NotImplementedError

    def set_phase(self, phase: TruckPhase) -> None:
        raise NotImplementedError

    def set_cargo(self, units: int) -> None:
        raise NotImplementedError

    def adjust_cargo(self, delta: int) -> None:
        raise NotImplementedError

    def begin_edge(self, target: int) -> None:
        raise NotImplementedError

    def begin_service(self) -> None:
        raise NotImplementedError

    def claim_segment(self, segment: str) -> bool:
        raise NotImplementedError

    def release_segment(self, segment: str) -> None:
        raise NotImplementedError

    # run bookkeeping hooks (no-ops outside the twin runtime)
    def delivery_completed(self, order_id: str, customer: str, marker: int) -> None:
        pass

    def plans_ready(self, pre, post) -> None:
        pass

    def report_ready(self, report: dict) -> None:
        pass

    def fail_run(self, reason: str) -> None:
        pass


@dataclass
class Behavior:
    spec: AgentSpec

    @property
    def alias(self) -> str:
        return self.spec.alias

    def on_start(self, ctx: AgentContext) -> None:
        pass

    def on_message(self, env: Envelope, ctx: AgentContext) -> None:
        pass

    def on_world_event(self, event: WorldEvent, ctx: AgentContext) -> None:
        pass

    def on_tick(self, ctx: AgentContext) -> None:
        pass

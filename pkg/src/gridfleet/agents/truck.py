"""Truck agent: executes one transport task end to end.

The fulfilment loop per stop is notice-of-arrival, wait for the customer's
confirmation of receipt, then a timed offloading stop; after the last stop
the truck heads home, announces itself to its depot and reports the task
complete. Single-track road stretches are claimed before entry and
released on exit, with peers kept informed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..gridworld.grid import normalize_edge
from ..gridworld.world import TruckPhase, WorldEvent
from ..messaging.envelope import CONFIRM, Envelope, validate_payload
from .base import AgentContext, Behavior
from .model import TransportOrder, TransportTask


@dataclass
class TruckBehavior(Behavior):
    peers: list[str] = field(default_factory=list)  # other trucks, for road-usage notices

    def __post_init__(self) -> None:
        self.task: TransportTask | None = None
        self.orders: dict[str, TransportOrder] = {}
        self.route_left: list[int] = []
        self.stops_left: list[tuple[int, str]] = []
        self.served: list[str] = []
        self.failed: list[str] = []
        self.held_segments: set[str] = set()
        self.peer_claims: dict[str, str] = {}  # segment -> holder, as heard from peers
        self.want_move = False
        self.serving_stop: tuple[int, str] | None = None
        self.pending_notice: str | None = None  # msg_id of the outstanding notice
        self.notice_order: str | None = None
        self.notice_sent_tick = 0
        self.notice_attempts = 0
        self.pending_depot_arrival: str | None = None
        self.done = False

    # -- messages ------------------------------------------------------------

    def on_message(self, env: Envelope, ctx: AgentContext) -> None:
        if env.msg_type == "TransportTask" and env.performative == "request":
            self._accept_task(env, ctx)
        elif env.correlation_id and env.correlation_id == self.pending_notice:
            self._notice_answered(env, ctx)
        elif env.correlation_id and env.correlation_id == self.pending_depot_arrival:
            self._depot_acknowledged(env, ctx)
        elif env.msg_type in ("SegmentClaim", "SegmentRelease"):
            usage = validate_payload(env.msg_type, env.payload)
            if env.msg_type == "SegmentClaim":
                self.peer_claims[usage.segment] = usage.truck
            elif self.peer_claims.get(usage.segment) == usage.truck:
                del self.peer_claims[usage.segment]

    def _accept_task(self, env: Envelope, ctx: AgentContext) -> None:
        dispatch = validate_payload("TransportTask", env.payload)
        if self.task is not None and not self.done:
            ctx.reply(env, "refuse", "Error", {"error": f"{self.alias} already has a task"})
            return
        task: TransportTask = dispatch.task
        try:
            task.check()
        except ValueError as exc:
            ctx.reply(env, "refuse", "Error", {"error": str(exc)})
            return
        if task.route[0] != ctx.truck_position():
            ctx.reply(
                env,
                "refuse",
                "Error",
                {"error": f"route starts at {task.route[0]}, truck is at {ctx.truck_position()}"},
            )
            return
        self.task = task
        self.orders = {o.order_id: o for o in dispatch.orders}
        self.route_left = list(task.route[1:])
        self.stops_left = [tuple(s) for s in task.stops]
        self.done = False
        ctx.set_cargo(sum(self.orders[oid].demand for _, oid in self.stops_left))
        ctx.reply(env, CONFIRM, "Ack", {})
        if self.route_left:
            self.want_move = True
        else:
            self._arrive_home(ctx)

    def _notice_answered(self, env: Envelope, ctx: AgentContext) -> None:
        self.pending_notice = None
        if env.performative == CONFIRM and env.msg_type == "ConfirmationOfReceipt":
            ctx.begin_service()
            self.serving_stop = self.stops_left[0]
        else:
            # the stop is written off; the tour continues
            self.failed.append(self.stops_left[0][1])
            self.stops_left.pop(0)
            self.notice_order = None
            self._after_stop(ctx)

    def _depot_acknowledged(self, env: Envelope, ctx: AgentContext) -> None:
        self.pending_depot_arrival = None
        assert self.task is not None
        ctx.inform(
            self.spec.carrier or env.sender,
            "FulfilmentComplete",
            {
                "carrier": self.spec.carrier or env.sender,
                "truck": self.alias,
                "task_id": self.task.task_id,
                "failed_orders": list(self.failed),
            },
        )
        ctx.set_phase(TruckPhase.DONE)
        self.done = True

    # -- world ---------------------------------------------------------------

    def on_world_event(self, event: WorldEvent, ctx: AgentContext) -> None:
        if event.kind == "arrived_at_node":
            self._arrived(event.marker, ctx)
        elif event.kind == "service_complete":
            self._service_finished(ctx)

    def _arrived(self, marker: int, ctx: AgentContext) -> None:
        if self.route_left and self.route_left[0] == marker:
            self.route_left.pop(0)
        self._release_spent_segments(ctx)
        if self.stops_left and self.stops_left[0][0] == marker:
            self._send_notice(ctx)
        elif self.route_left:
            self.want_move = True
        else:
            self._arrive_home(ctx)

    def _service_finished(self, ctx: AgentContext) -> None:
        assert self.serving_stop is not None
        marker, order_id = self.serving_stop
        self.serving_stop = None
        self.stops_left.pop(0)
        self.served.append(order_id)
        order = self.orders[order_id]
        ctx.adjust_cargo(-order.demand)
        ctx.delivery_completed(order_id, order.customer, marker)
        self._after_stop(ctx)

    def _after_stop(self, ctx: AgentContext) -> None:
        position = ctx.truck_position()
        if self.stops_left and self.stops_left[0][0] == position:
            self._send_notice(ctx)
        elif self.route_left:
            self.want_move = True
        else:
            self._arrive_home(ctx)

    # -- fulfilment steps ------------------------------------------------------

    def _send_notice(self, ctx: AgentContext) -> None:
        marker, order_id = self.stops_left[0]
        order = self.orders[order_id]
        if self.notice_order != order_id:
            self.notice_order = order_id
            self.notice_attempts = 0
        self.notice_attempts += 1
        self.notice_sent_tick = ctx.now()
        self.pending_notice = ctx.request(
            order.customer,
            "NoticeOfArrival",
            {"order_id": order_id, "truck": self.alias, "marker": marker},
        )

    def _arrive_home(self, ctx: AgentContext) -> None:
        if self.pending_depot_arrival is not None or self.done or self.task is None:
            return
        carrier = self.spec.carrier
        assert carrier is not None
        self.pending_depot_arrival = ctx.request(
            carrier,
            "DepotArrival",
            {"truck": self.alias, "marker": ctx.truck_position()},
        )

    def _release_spent_segments(self, ctx: AgentContext) -> None:
        grid = ctx.grid()
        next_edge = None
        if self.route_left:
            next_edge = normalize_edge(ctx.truck_position(), self.route_left[0])
        for segment in sorted(self.held_segments):
            if next_edge is None or next_edge not in grid.segments[segment]:
                ctx.release_segment(segment)
                self.held_segments.discard(segment)
                for peer in self.peers:
                    ctx.inform(peer, "SegmentRelease", {"segment": segment, "truck": self.alias})

    # -- clock -----------------------------------------------------------------

    def on_tick(self, ctx: AgentContext) -> None:
        self._check_notice_timeout(ctx)
        if not self.want_move or ctx.is_traversing() or self.done:
            return
        if not self.route_left:
            self.want_move = False
            return
        target = self.route_left[0]
        position = ctx.truck_position()
        segment = ctx.grid().segment_of(position, target)
        if segment is not None and segment not in self.held_segments:
            if not ctx.claim_segment(segment):
                return  # occupied: hold position, ask again next tick
            self.held_segments.add(segment)
            for peer in self.peers:
                ctx.inform(peer, "SegmentClaim", {"segment": segment, "truck": self.alias})
        ctx.set_phase(TruckPhase.EN_ROUTE if self.stops_left else TruckPhase.RETURNING)
        ctx.begin_edge(target)
        self.want_move = False

    def _check_notice_timeout(self, ctx: AgentContext) -> None:
        timeout = ctx.settings.confirm_timeout_ticks
        if self.pending_notice is None or timeout is None:
            return
        if ctx.now() - self.notice_sent_tick < timeout:
            return
        self.pending_notice = None
        if self.notice_attempts <= ctx.settings.confirm_retry_limit:
            self._send_notice(ctx)
        else:
            self.failed.append(self.stops_left[0][1])
            self.stops_left.pop(0)
            self.notice_order = None
            self._after_stop(ctx)

    # -- introspection -----------------------------------------------------------

    def snapshot(self) -> dict:
        return {
            "task": self.task.task_id if self.task else None,
            "served": list(self.served),
            "failed": list(self.failed),
            "stops_left": len(self.stops_left),
            "done": self.done,
        }

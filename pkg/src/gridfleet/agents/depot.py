"""Carrier-depot agent: the carrier role folded into its depot.

Submits the carrier's orders to the orchestrator, turns the returned route
assignment into per-truck transport tasks, acknowledges returning trucks
and reports carrier-level completion upstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..messaging.envelope import CONFIRM, Envelope, validate_payload
from .base import AgentContext, Behavior
from .model import ORCHESTRATOR_ALIAS, TransportOrder


@dataclass
class DepotBehavior(Behavior):
    orders: list[TransportOrder] = field(default_factory=list)
    truck_aliases: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.trucks_done: set[str] = set()
        self.failed_orders: list[str] = []
        self.assignment = None  # RouteAssignment, once received
        self.report: dict | None = None
        self.reported_complete = False

    def on_start(self, ctx: AgentContext) -> None:
        ctx.request(
            ORCHESTRATOR_ALIAS,
            "TransportOrder",
            {
                "carrier": self.alias,
                "orders": [o.model_dump(mode="json") for o in self.orders],
            },
        )

    def on_message(self, env: Envelope, ctx: AgentContext) -> None:
        if env.performative == "request" and env.msg_type == "RoutePlan":
            self._accept_plan(env, ctx)
        elif env.performative == "request" and env.msg_type == "DepotArrival":
            arrival = validate_payload("DepotArrival", env.payload)
            ctx.reply(env, CONFIRM, "Ack", {"note": f"welcome back {arrival.truck}"})
        elif env.performative == "inform" and env.msg_type == "FulfilmentComplete":
            self._truck_finished(env, ctx)
        elif env.performative == "inform" and env.msg_type == "DistanceReport":
            self.report = env.payload

    def _accept_plan(self, env: Envelope, ctx: AgentContext) -> None:
        assignment = validate_payload("RoutePlan", env.payload)
        if assignment.carrier != self.alias:
            ctx.reply(
                env,
                "refuse",
                "Error",
                {"error": f"plan for {assignment.carrier} delivered to {self.alias}"},
            )
            return
        self.assignment = assignment
        ctx.reply(env, CONFIRM, "Ack", {})
        orders_by_id = {o.order_id: o for o in assignment.orders}
        for task in assignment.tasks:
            if task.truck not in self.truck_aliases:
                continue
            task_orders = [orders_by_id[oid] for _, oid in task.stops]
            ctx.request(
                task.truck,
                "TransportTask",
                {
                    "task": task.model_dump(mode="json"),
                    "orders": [o.model_dump(mode="json") for o in task_orders],
                },
            )

    def _truck_finished(self, env: Envelope, ctx: AgentContext) -> None:
        report = validate_payload("FulfilmentComplete", env.payload)
        if report.truck is None or report.truck not in self.truck_aliases:
            return
        self.trucks_done.add(report.truck)
        self.failed_orders.extend(report.failed_orders)
        if not self.reported_complete and self.trucks_done >= set(self.truck_aliases):
            self.reported_complete = True
            ctx.inform(
                ORCHESTRATOR_ALIAS,
                "FulfilmentComplete",
                {
                    "carrier": self.alias,
                    "truck": None,
                    "task_id": None,
                    "failed_orders": list(self.failed_orders),
                },
            )

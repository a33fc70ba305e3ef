"""Orchestrator agent: pools every carrier's orders, solves the joint
routing problem, hands each carrier its own slice of the result and, once
all carriers report fulfilment, announces the distance saved."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..gridworld.grid import GridMap
from ..messaging.envelope import CONFIRM, Envelope, validate_payload
from ..solver import (
    BASELINE,
    COLLABORATIVE,
    FleetTruck,
    Infeasible,
    Instance,
    InstanceTooLarge,
    Plan,
    solve_exact,
    solve_heuristic,
)
from .base import AgentContext, Behavior
from .model import TransportOrder, TransportTask


class IncompleteRun(Exception):
    """The distance report was requested before every carrier finished."""


@dataclass
class OrchestratorBehavior(Behavior):
    grid: GridMap | None = None
    fleet: list[FleetTruck] = field(default_factory=list)
    customers: set[str] = field(default_factory=set)
    prefer_exact: bool = True

    def __post_init__(self) -> None:
        self.submissions: dict[str, list[TransportOrder]] = {}
        self.plan_pre: Plan | None = None
        self.plan_post: Plan | None = None
        self.carriers_done: set[str] = set()
        self.failed_orders: list[str] = []
        self.report: dict | None = None

    @property
    def carriers(self) -> set[str]:
        return {t.carrier for t in self.fleet}

    def on_message(self, env: Envelope, ctx: AgentContext) -> None:
        if env.performative == "request" and env.msg_type == "TransportOrder":
            self._accept_orders(env, ctx)
        elif env.performative == "inform" and env.msg_type == "FulfilmentComplete":
            self._carrier_finished(env, ctx)

    # -- order intake ----------------------------------------------------------

    def _accept_orders(self, env: Envelope, ctx: AgentContext) -> None:
        submission = validate_payload("TransportOrder", env.payload)
        if submission.carrier != env.sender or submission.carrier not in self.carriers:
            ctx.reply(
                env, "refuse", "Error", {"error": f"unknown carrier {submission.carrier!r}"}
            )
            return
        for order in submission.orders:
            if order.carrier != submission.carrier:
                ctx.reply(
                    env,
                    "refuse",
                    "Error",
                    {"error": f"order {order.order_id} does not belong to {submission.carrier}"},
                )
                return
            if order.customer not in self.customers:
                ctx.reply(
                    env,
                    "refuse",
                    "Error",
                    {"error": f"order {order.order_id} names unknown customer {order.customer}"},
                )
                return
        self.submissions[submission.carrier] = list(submission.orders)
        ctx.reply(env, CONFIRM, "Ack", {})
        if set(self.submissions) >= self.carriers:
            self._plan_collaboration(ctx)

    # -- solving -----------------------------------------------------------------

    def _solve(self, instance: Instance) -> Plan:
        if self.prefer_exact:
            try:
                return solve_exact(instance)
            except InstanceTooLarge:
                pass
        return solve_heuristic(instance)

    def _plan_collaboration(self, ctx: AgentContext) -> None:
        assert self.grid is not None
        orders = [o for carrier in sorted(self.submissions) for o in self.submissions[carrier]]
        try:
            self.plan_pre = self._solve(
                Instance(grid=self.grid, trucks=self.fleet, orders=orders, mode=BASELINE)
            )
            self.plan_post = self._solve(
                Instance(grid=self.grid, trucks=self.fleet, orders=orders, mode=COLLABORATIVE)
            )
        except Infeasible as exc:
            for carrier in sorted(self.carriers):
                ctx.inform(carrier, "Error", {"error": f"no feasible joint plan: {exc}"})
            ctx.fail_run(f"solver found the pooled orders infeasible: {exc}")
            return
        ctx.plans_ready(self.plan_pre, self.plan_post)
        order_index = {o.order_id: o for o in orders}
        trucks_by_carrier: dict[str, list[FleetTruck]] = {}
        for truck in self.fleet:
            trucks_by_carrier.setdefault(truck.carrier, []).append(truck)
        for carrier in sorted(self.carriers):
            tasks = []
            carrier_orders: list[TransportOrder] = []
            for truck in sorted(trucks_by_carrier[carrier], key=lambda t: t.alias):
                tour = self.plan_post.tours[truck.alias]
                tasks.append(
                    TransportTask(
                        task_id=f"task-{truck.alias}",
                        truck=truck.alias,
                        route=list(tour.route),
                        stops=[tuple(s) for s in tour.stops],
                    )
                )
                carrier_orders.extend(order_index[oid] for _, oid in tour.stops)
            ctx.request(
                carrier,
                "RoutePlan",
                {
                    "carrier": carrier,
                    "tasks": [t.model_dump(mode="json") for t in tasks],
                    "orders": [o.model_dump(mode="json") for o in carrier_orders],
                },
            )

    # -- completion ----------------------------------------------------------------

    def _carrier_finished(self, env: Envelope, ctx: AgentContext) -> None:
        report = validate_payload("FulfilmentComplete", env.payload)
        if report.carrier not in self.carriers or report.carrier != env.sender:
            return
        self.carriers_done.add(report.carrier)
        self.failed_orders.extend(report.failed_orders)
        if self.carriers_done >= self.carriers and self.report is None:
            summary = self.build_report()
            self.report = summary
            for carrier in sorted(self.carriers):
                ctx.inform(carrier, "DistanceReport", summary)
            ctx.report_ready(summary)

    def build_report(self) -> dict:
        """Distance accounting for the finished run."""
        if self.carriers_done < self.carriers:
            missing = sorted(self.carriers - self.carriers_done)
            raise IncompleteRun(f"still waiting on {missing}")
        assert self.plan_pre is not None and self.plan_post is not None
        pre = self.plan_pre.total_blocks
        post = self.plan_post.total_blocks
        return {
            "pre_total": pre,
            "post_total": post,
            "reduction": pre - post,
            "relative_reduction": (pre - post) / pre if pre else 0.0,
        }

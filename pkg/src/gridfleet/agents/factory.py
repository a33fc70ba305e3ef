"""Shared behavior construction from a scenario, used by both the
in-process run engine and networked agent nodes."""

from __future__ import annotations

from ..gridworld.scenario import Scenario
from ..solver import FleetTruck
from .base import Behavior
from .customer import CustomerBehavior
from .depot import DepotBehavior
from .model import AgentSpec, orders_from_scenario
from .orchestrator import OrchestratorBehavior
from .truck import TruckBehavior


def scenario_fleet(scenario: Scenario) -> list[FleetTruck]:
    fleet = [
        FleetTruck(alias=t.alias, depot=d.marker, capacity=t.capacity, carrier=d.label)
        for d in scenario.depots
        for t in d.trucks
    ]
    fleet.sort(key=lambda t: t.alias)
    return fleet


def build_behavior(spec: AgentSpec, scenario: Scenario, prefer_exact: bool = True) -> Behavior:
    fleet = scenario_fleet(scenario)
    orders = orders_from_scenario(scenario)
    if spec.kind == "orchestrator":
        return OrchestratorBehavior(
            spec,
            grid=scenario.build_map(),
            fleet=fleet,
            customers={c.label for c in scenario.customers},
            prefer_exact=prefer_exact,
        )
    if spec.kind == "customer":
        return CustomerBehavior(
            spec,
            expected_orders={o.order_id for o in orders if o.customer == spec.alias},
        )
    if spec.kind == "depot":
        own = sorted(
            (o for o in orders if o.carrier == spec.alias), key=lambda o: o.order_id
        )
        own_trucks = [t.alias for t in fleet if t.carrier == spec.alias]
        return DepotBehavior(spec, orders=list(own), truck_aliases=own_trucks)
    if spec.kind == "truck":
        peers = [t.alias for t in fleet if t.alias != spec.alias]
        return TruckBehavior(spec, peers=peers)
    raise ValueError(f"unknown agent kind {spec.kind!r}")

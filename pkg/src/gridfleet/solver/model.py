"""Routing instances and plans.

An instance bundles the map, the fleet and the orders, in one of two
pooling modes: ``baseline`` keeps every order with its owning carrier's
trucks, ``collaborative`` lets any truck serve any order. A plan assigns
each order to exactly one truck and gives each truck a closed tour from
its depot; cost is the total number of grid edges driven.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..orders import TransportOrder, orders_from_scenario
from ..gridworld.grid import GridMap, MarkerId
from ..gridworld.scenario import Scenario

BASELINE = "baseline"
COLLABORATIVE = "collaborative"


class SolverError(Exception):
    pass


class Infeasible(SolverError):
    """No capacity-feasible assignment of orders to trucks exists."""


class InstanceTooLarge(SolverError):
    """The instance exceeds the exhaustive search budget."""


class SynergyUndefined(SolverError):
    """Relative reduction is undefined for an empty pre-collaboration plan."""


@dataclass(frozen=True)
class FleetTruck:
    alias: str
    depot: MarkerId
    capacity: int
    carrier: str


@dataclass
class Instance:
    grid: GridMap
    trucks: list[FleetTruck]
    orders: list[TransportOrder]
    mode: str = COLLABORATIVE
    _dist: dict[MarkerId, dict[MarkerId, int]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.mode not in (BASELINE, COLLABORATIVE):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.trucks:
            raise ValueError("instance has no trucks")
        carriers = {t.carrier for t in self.trucks}
        for order in self.orders:
            if order.carrier not in carriers:
                raise ValueError(f"order {order.order_id}: carrier {order.carrier} owns no truck")
            if not self.grid.has_marker(order.destination):
                raise ValueError(f"order {order.order_id}: marker {order.destination} off the map")
        for truck in self.trucks:
            if not self.grid.has_marker(truck.depot):
                raise ValueError(f"truck {truck.alias}: depot marker {truck.depot} off the map")

    @classmethod
    def from_scenario(cls, scenario: Scenario, mode: str = COLLABORATIVE) -> "Instance":
        trucks = [
            FleetTruck(alias=t.alias, depot=d.marker, capacity=t.capacity, carrier=d.label)
            for d in scenario.depots
            for t in d.trucks
        ]
        return cls(
            grid=scenario.build_map(),
            trucks=sorted(trucks, key=lambda t: t.alias),
            orders=orders_from_scenario(scenario),
            mode=mode,
        )

    def distance(self, a: MarkerId, b: MarkerId) -> int:
        row = self._dist.get(b)
        if row is None:
            row = self.grid._distances_to(b)
            self._dist[b] = row
        return row[a]

    def candidate_trucks(self, order: TransportOrder) -> list[FleetTruck]:
        """Trucks allowed to serve the order under the instance mode.

        A time window, when present, acts as a hard filter: the truck's
        depot must be within ``close`` blocks of the destination.
        """
        out = []
        for truck in self.trucks:
            if self.mode == BASELINE and truck.carrier != order.carrier:
                continue
            if truck.capacity < order.demand:
                continue
            if order.time_window is not None:
                _, close = order.time_window
                if self.distance(truck.depot, order.destination) > close:
                    continue
            out.append(truck)
        return out


@dataclass(frozen=True)
class Tour:
    truck: str
    route: tuple[MarkerId, ...]
    stops: tuple[tuple[MarkerId, str], ...]  # (marker, order_id) in visit order

    @property
    def blocks(self) -> int:
        return len(self.route) - 1


@dataclass(frozen=True)
class Plan:
    tours: dict[str, Tour]
    total_blocks: int

    def stop_count(self) -> int:
        return sum(len(t.stops) for t in self.tours.values())

    def sort_key(self) -> tuple:
        """Lexicographic comparison key over tours in truck-alias order."""
        return tuple(self.tours[a].route for a in sorted(self.tours))

    def check(self, instance: Instance) -> None:
        """Assert the plan satisfies every structural invariant."""
        trucks = {t.alias: t for t in instance.trucks}
        if set(self.tours) != set(trucks):
            raise ValueError("plan does not cover the fleet exactly")
        orders = {o.order_id: o for o in instance.orders}
        served: set[str] = set()
        total = 0
        for alias, tour in self.tours.items():
            truck = trucks[alias]
            if tour.route[0] != truck.depot or tour.route[-1] != truck.depot:
                raise ValueError(f"tour of {alias} does not start/end at its depot")
            total += instance.grid.route_length(tour.route)
            load = 0
            cursor = 0
            for marker, order_id in tour.stops:
                order = orders[order_id]
                if order.destination != marker:
                    raise ValueError(f"stop {order_id} at wrong marker {marker}")
                if order_id in served:
                    raise ValueError(f"order {order_id} served twice")
                served.add(order_id)
                load += order.demand
                cursor = tour.route.index(marker, cursor)
            if load > truck.capacity:
                raise ValueError(f"tour of {alias} exceeds capacity {truck.capacity}")
        if served != set(orders):
            raise ValueError(f"orders not served: {sorted(set(orders) - served)}")
        if total != self.total_blocks:
            raise ValueError(f"total_blocks {self.total_blocks} != measured {total}")


def synergy(pre: Plan | int, post: Plan | int) -> float:
    """Relative distance reduction of the post plan versus the pre plan."""
    pre_total = pre.total_blocks if isinstance(pre, Plan) else int(pre)
    post_total = post.total_blocks if isinstance(post, Plan) else int(post)
    if pre_total == 0:
        raise SynergyUndefined("pre-collaboration total is zero")
    return (pre_total - post_total) / pre_total

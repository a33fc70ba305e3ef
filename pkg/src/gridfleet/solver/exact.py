"""Exhaustive solver: every capacity-feasible order-to-truck assignment is
enumerated and each truck's stop order is optimised by permutation search.
Certain at desk scale, useless beyond it; see heuristic.py for the rest.
"""

from __future__ import annotations

from itertools import permutations

from ..gridworld.grid import MarkerId
from .model import Infeasible, Instance, InstanceTooLarge, Plan, Tour

MAX_ORDERS = 10
MAX_TRUCKS = 4
MAX_STOPS_PER_TRUCK = 8


def expand_route(instance: Instance, depot: MarkerId, visit: tuple[MarkerId, ...]) -> tuple[MarkerId, ...]:
    """Closed tour through the visit markers with shortest-path legs."""
    if not visit:
        return (depot,)
    route: list[MarkerId] = [depot]
    for target in (*visit, depot):
        leg = instance.grid.shortest_path(route[-1], target)
        route.extend(leg[1:])
    return tuple(route)


def _best_tour(
    instance: Instance, depot: MarkerId, markers: frozenset[MarkerId]
) -> tuple[int, tuple[MarkerId, ...], tuple[MarkerId, ...]]:
    """Optimal closed tour over a marker set: (cost, visit order, route).

    Ties on cost are broken by the lexicographically smallest expanded
    route so results never depend on iteration order.
    """
    if not markers:
        return 0, (), (depot,)
    best_cost: int | None = None
    tying: list[tuple[MarkerId, ...]] = []
    for perm in permutations(sorted(markers)):
        cost = instance.distance(depot, perm[0])
        for a, b in zip(perm, perm[1:]):
            cost += instance.distance(a, b)
        cost += instance.distance(perm[-1], depot)
        if best_cost is None or cost < best_cost:
            best_cost = cost
            tying = [perm]
        elif cost == best_cost:
            tying.append(perm)
    assert best_cost is not None
    best_visit = tying[0]
    best_route = expand_route(instance, depot, best_visit)
    for perm in tying[1:]:
        route = expand_route(instance, depot, perm)
        if route < best_route:
            best_route = route
            best_visit = perm
    return best_cost, best_visit, best_route


def _plan_from_assignment(
    instance: Instance,
    assignment: list[int],
    tour_cache: dict[tuple[int, frozenset[MarkerId]], tuple[int, tuple, tuple]],
) -> Plan:
    tours: dict[str, Tour] = {}
    total = 0
    for ti, truck in enumerate(instance.trucks):
        assigned = [o for oi, o in enumerate(instance.orders) if assignment[oi] == ti]
        markers = frozenset(o.destination for o in assigned)
        key = (ti, markers)
        if key not in tour_cache:
            tour_cache[key] = _best_tour(instance, truck.depot, markers)
        cost, visit, route = tour_cache[key]
        rank = {marker: i for i, marker in enumerate(visit)}
        stops = tuple(
            (o.destination, o.order_id)
            for o in sorted(assigned, key=lambda o: (rank[o.destination], o.order_id))
        )
        tours[truck.alias] = Tour(truck=truck.alias, route=route, stops=stops)
        total += cost
    return Plan(tours=tours, total_blocks=total)


def solve_exact(instance: Instance) -> Plan:
    """Minimal-total-blocks plan, or raise Infeasible / InstanceTooLarge."""
    if len(instance.orders) > MAX_ORDERS or len(instance.trucks) > MAX_TRUCKS:
        raise InstanceTooLarge(
            f"{len(instance.orders)} orders / {len(instance.trucks)} trucks exceed "
            f"the exhaustive budget of {MAX_ORDERS}/{MAX_TRUCKS}"
        )
    truck_index = {t.alias: i for i, t in enumerate(instance.trucks)}
    candidates = []
    for order in instance.orders:
        allowed = [truck_index[t.alias] for t in instance.candidate_trucks(order)]
        if not allowed:
            raise Infeasible(f"no truck can serve order {order.order_id}")
        candidates.append(allowed)

    tour_cache: dict[tuple[int, frozenset[MarkerId]], tuple[int, tuple, tuple]] = {}
    cost_cache: dict[tuple[int, frozenset[MarkerId]], int] = {}

    def assignment_cost(assignment: list[int]) -> int:
        total = 0
        for ti, truck in enumerate(instance.trucks):
            markers = frozenset(
                o.destination for oi, o in enumerate(instance.orders) if assignment[oi] == ti
            )
            key = (ti, markers)
            if key not in cost_cache:
                if key in tour_cache:
                    cost_cache[key] = tour_cache[key][0]
                else:
                    cost_cache[key] = _best_tour(instance, truck.depot, markers)[0]
            total += cost_cache[key]
        return total

    loads = [0] * len(instance.trucks)
    stop_counts = [0] * len(instance.trucks)
    assignment = [0] * len(instance.orders)
    best: tuple[int, list[int]] | None = None
    truncated = False

    def dfs(order_idx: int) -> None:
        nonlocal best, truncated
        if order_idx == len(instance.orders):
            cost = assignment_cost(assignment)
            if best is None or cost < best[0]:
                best = (cost, assignment.copy())
            elif cost == best[0]:
                challenger = _plan_from_assignment(instance, assignment, tour_cache)
                incumbent = _plan_from_assignment(instance, best[1], tour_cache)
                if challenger.sort_key() < incumbent.sort_key():
                    best = (cost, assignment.copy())
            return
        order = instance.orders[order_idx]
        for ti in candidates[order_idx]:
            if loads[ti] + order.demand > instance.trucks[ti].capacity:
                continue
            if stop_counts[ti] + 1 > MAX_STOPS_PER_TRUCK:
                truncated = True
                continue
            loads[ti] += order.demand
            stop_counts[ti] += 1
            assignment[order_idx] = ti
            dfs(order_idx + 1)
            loads[ti] -= order.demand
            stop_counts[ti] -= 1

    dfs(0)
    if best is None:
        if truncated:
            raise InstanceTooLarge(
                f"every feasible assignment needs more than {MAX_STOPS_PER_TRUCK} stops on one truck"
            )
        raise Infeasible("orders do not fit the fleet's capacities")
    plan = _plan_from_assignment(instance, best[1], tour_cache)
    plan.check(instance)
    return plan

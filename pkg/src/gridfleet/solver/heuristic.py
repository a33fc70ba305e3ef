"""Greedy routing for instances beyond the exhaustive budget: cheapest
insertion over all capacity-feasible trucks, then per-tour 2-opt.

Cheapest insertion alone can strand a late order when earlier placements
eat the only slack that fits it, so two fallback passes run before giving
up: a spare-capacity-first insertion, and (at desk scale) a plain search
for any feasible packing. All passes are deterministic for a given
instance ordering.
"""

from __future__ import annotations

from ..orders import TransportOrder
from ..gridworld.grid import MarkerId
from .exact import expand_route
from .model import FleetTruck, Infeasible, Instance, Plan, Tour

FEASIBILITY_SEARCH_LIMIT = 12  # orders; beyond this the DFS fallback is skipped


def _seq_cost(instance: Instance, depot: MarkerId, seq: list[MarkerId]) -> int:
    cost = 0
    prev = depot
    for marker in seq:
        cost += instance.distance(prev, marker)
        prev = marker
    return cost + instance.distance(prev, depot)


def _two_opt(instance: Instance, depot: MarkerId, seq: list[MarkerId]) -> list[MarkerId]:
    """Reverse sub-sequences while that strictly shortens the tour."""
    improved = True
    while improved:
        improved = False
        for i in range(len(seq) - 1):
            for j in range(i + 1, len(seq)):
                candidate = seq[:i] + seq[i : j + 1][::-1] + seq[j + 1 :]
                if _seq_cost(instance, depot, candidate) < _seq_cost(instance, depot, seq):
                    seq = candidate
                    improved = True
    return seq


def _cheapest_position(
    instance: Instance, truck: FleetTruck, seq: list[MarkerId], marker: MarkerId
) -> tuple[int, int]:
    """Best (added cost, position) for inserting marker into the stop sequence."""
    hops = [truck.depot, *seq, truck.depot]
    best_delta = None
    best_pos = 0
    for pos in range(len(seq) + 1):
        delta = (
            instance.distance(hops[pos], marker)
            + instance.distance(marker, hops[pos + 1])
            - instance.distance(hops[pos], hops[pos + 1])
        )
        if best_delta is None or delta < best_delta:
            best_delta = delta
            best_pos = pos
    return best_delta or 0, best_pos


def _insert_all(
    instance: Instance,
    order_sequence: list[TransportOrder],
    prefer_spare_capacity: bool,
) -> dict[str, list[TransportOrder]] | None:
    """Assign every order to a truck, or None if some order does not fit."""
    loads = {t.alias: 0 for t in instance.trucks}
    seqs: dict[str, list[MarkerId]] = {t.alias: [] for t in instance.trucks}
    assigned: dict[str, list[TransportOrder]] = {t.alias: [] for t in instance.trucks}
    for order in order_sequence:
        best = None  # (primary key, rank, position)
        for rank, truck in enumerate(instance.trucks):
            if truck not in instance.candidate_trucks(order):
                continue
            if loads[truck.alias] + order.demand > truck.capacity:
                continue
            delta, pos = _cheapest_position(instance, truck, seqs[truck.alias], order.destination)
            spare = truck.capacity - loads[truck.alias] - order.demand
            key = (-spare, delta) if prefer_spare_capacity else (delta,)
            if best is None or (key, rank) < (best[0], best[1]):
                best = (key, rank, pos)
        if best is None:
            return None
        _, rank, pos = best
        alias = instance.trucks[rank].alias
        seqs[alias].insert(pos, order.destination)
        assigned[alias].append(order)
        loads[alias] += order.demand
    return assigned


def _feasible_packing(instance: Instance) -> dict[str, list[TransportOrder]] | None:
    """First capacity-feasible assignment found by depth-first search."""
    if len(instance.orders) > FEASIBILITY_SEARCH_LIMIT:
        return None
    loads = {t.alias: 0 for t in instance.trucks}
    assigned: dict[str, list[TransportOrder]] = {t.alias: [] for t in instance.trucks}
    orders = sorted(instance.orders, key=lambda o: -o.demand)

    def dfs(idx: int) -> bool:
        if idx == len(orders):
            return True
        order = orders[idx]
        for truck in instance.candidate_trucks(order):
            if loads[truck.alias] + order.demand > truck.capacity:
                continue
            loads[truck.alias] += order.demand
            assigned[truck.alias].append(order)
            if dfs(idx + 1):
                return True
            loads[truck.alias] -= order.demand
            assigned[truck.alias].pop()
        return False

    return assigned if dfs(0) else None


def _tour_seq(instance: Instance, truck: FleetTruck, orders: list[TransportOrder]) -> list[MarkerId]:
    """Marker visit sequence for a truck's orders: cheapest insertion + 2-opt."""
    seq: list[MarkerId] = []
    for order in orders:
        if order.destination in seq:
            continue
        _, pos = _cheapest_position(instance, truck, seq, order.destination)
        seq.insert(pos, order.destination)
    return _two_opt(instance, truck.depot, seq)


def _improve_assignment(
    instance: Instance, assigned: dict[str, list[TransportOrder]], max_rounds: int = 200
) -> None:
    """Relocate or swap single orders between trucks while total length drops."""
    trucks = {t.alias: t for t in instance.trucks}
    loads = {alias: sum(o.demand for o in orders) for alias, orders in assigned.items()}

    def cost_of(alias: str, orders: list[TransportOrder]) -> int:
        return _seq_cost(instance, trucks[alias].depot, _tour_seq(instance, trucks[alias], orders))

    def allowed(order: TransportOrder) -> set[str]:
        return {t.alias for t in instance.candidate_trucks(order)}

    for _ in range(max_rounds):
        costs = {alias: cost_of(alias, orders) for alias, orders in assigned.items()}
        best = None  # (delta, kind, payload)
        aliases = sorted(assigned)
        for source in aliases:
            for idx, order in enumerate(assigned[source]):
                order_allowed = allowed(order)
                without = assigned[source][:idx] + assigned[source][idx + 1 :]
                source_after = cost_of(source, without)
                for target in aliases:
                    if target == source or target not in order_allowed:
                        continue
                    # plain relocation
                    if loads[target] + order.demand <= trucks[target].capacity:
                        target_after = cost_of(target, assigned[target] + [order])
                        delta = (source_after - costs[source]) + (target_after - costs[target])
                        if delta < 0 and (best is None or delta < best[0]):
                            best = (delta, "move", (source, idx, target))
                    # pairwise exchange, for when both trucks are capacity-bound
                    for jdx, other in enumerate(assigned[target]):
                        if source not in allowed(other) or target not in order_allowed:
                            continue
                        if loads[source] - order.demand + other.demand > trucks[source].capacity:
                            continue
                        if loads[target] - other.demand + order.demand > trucks[target].capacity:
                            continue
                        src_after = cost_of(source, without + [other])
                        tgt_orders = assigned[target][:jdx] + assigned[target][jdx + 1 :] + [order]
                        tgt_after = cost_of(target, tgt_orders)
                        delta = (src_after - costs[source]) + (tgt_after - costs[target])
                        if delta < 0 and (best is None or delta < best[0]):
                            best = (delta, "swap", (source, idx, target, jdx))
        if best is None:
            return
        _, kind, payload = best
        if kind == "move":
            source, idx, target = payload
            order = assigned[source].pop(idx)
            assigned[target].append(order)
            loads[source] -= order.demand
            loads[target] += order.demand
        else:
            source, idx, target, jdx = payload
            order = assigned[source][idx]
            other = assigned[target][jdx]
            assigned[source][idx] = other
            assigned[target][jdx] = order
            loads[source] += other.demand - order.demand
            loads[target] += order.demand - other.demand


def solve_heuristic(instance: Instance) -> Plan:
    """Feasible plan by cheapest insertion, 2-opt and inter-tour moves."""
    # big orders first: cheapest insertion with a fighting chance of packing
    by_demand = sorted(instance.orders, key=lambda o: -o.demand)
    assigned = _insert_all(instance, by_demand, prefer_spare_capacity=False)
    if assigned is None:
        assigned = _insert_all(instance, by_demand, prefer_spare_capacity=True)
    if assigned is None:
        assigned = _feasible_packing(instance)
    if assigned is None:
        raise Infeasible("greedy insertion found no capacity-feasible assignment")
    _improve_assignment(instance, assigned)

    tours: dict[str, Tour] = {}
    total = 0
    for truck in instance.trucks:
        orders = assigned[truck.alias]
        visit = tuple(_tour_seq(instance, truck, orders))
        route = expand_route(instance, truck.depot, visit)
        rank_of = {marker: i for i, marker in enumerate(visit)}
        stops = tuple(
            (o.destination, o.order_id)
            for o in sorted(orders, key=lambda o: (rank_of[o.destination], o.order_id))
        )
        tours[truck.alias] = Tour(truck=truck.alias, route=route, stops=stops)
        total += len(route) - 1
    plan = Plan(tours=tours, total_blocks=total)
    plan.check(instance)
    return plan

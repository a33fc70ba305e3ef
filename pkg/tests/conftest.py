from __future__ import annotations

import random

import pytest

from gridfleet.agents.model import TransportOrder
from gridfleet.gridworld import full_grid
from gridfleet.gridworld.scenario import Scenario
from gridfleet.showcase import showcase_scenario
from gridfleet.solver import FleetTruck, Instance


@pytest.fixture
def showcase() -> Scenario:
    return showcase_scenario()


def random_instance(
    rng: random.Random,
    n_trucks: int,
    n_customers: int,
    mode: str,
    max_demand: int = 2,
) -> Instance:
    """Small random instance on the full 5x5 grid with distinct markers."""
    markers = rng.sample(range(25), n_trucks + n_customers)
    trucks = [
        FleetTruck(alias=f"T{i + 1}", depot=markers[i], capacity=rng.randint(2, 5), carrier=f"D{i + 1}")
        for i in range(n_trucks)
    ]
    orders = []
    for j in range(n_customers):
        owner = trucks[rng.randrange(n_trucks)]
        orders.append(
            TransportOrder(
                order_id=f"order-{j + 1}",
                carrier=owner.carrier,
                customer=f"C{j + 1}",
                destination=markers[n_trucks + j],
                demand=rng.randint(1, max_demand),
            )
        )
    return Instance(grid=full_grid(), trucks=trucks, orders=orders, mode=mode)

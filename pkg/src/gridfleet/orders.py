"""Domain records exchanged between agents: delivery orders, per-truck
transport tasks and the roster entries describing each launched agent."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from .gridworld.scenario import ALIAS_PATTERN, Scenario

ORCHESTRATOR_ALIAS = "orchestrator"


class TransportOrder(BaseModel):
    model_config = ConfigDict(extra="forbid")

    order_id: str
    carrier: str = Field(pattern=ALIAS_PATTERN)
    customer: str = Field(pattern=ALIAS_PATTERN)
    destination: int = Field(ge=0)
    demand: int = Field(ge=1)
    time_window: tuple[int, int] | None = None


class TransportTask(BaseModel):
    """A closed tour assigned to one truck plus the stops to serve on it."""

    model_config = ConfigDict(extra="forbid")

    task_id: str
    truck: str = Field(pattern=ALIAS_PATTERN)
    route: list[int]
    stops: list[tuple[int, str]] = Field(default_factory=list)  # (marker, order_id)

    def check(self) -> None:
        if not self.route:
            raise ValueError(f"task {self.task_id} has an empty route")
        if self.route[0] != self.route[-1]:
            raise ValueError(f"task {self.task_id} route does not return to its start")
        cursor = 0
        for marker, order_id in self.stops:
            try:
                cursor = self.route.index(marker, cursor)
            except ValueError:
                raise ValueError(
                    f"task {self.task_id}: stop {order_id} at {marker} is off-route or out of order"
                )


class AgentSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alias: str = Field(pattern=ALIAS_PATTERN)
    kind: str  # orchestrator | depot | truck | customer
    home: int | None = None
    capacity: int | None = None
    carrier: str | None = None  # owning depot, for trucks and customers

    def model_post_init(self, __context) -> None:
        if self.kind not in {"orchestrator", "depot", "truck", "customer"}:
            raise ValueError(f"unknown agent kind {self.kind!r}")
        if self.kind == "orchestrator":
            if self.home is not None:
                raise ValueError("the orchestrator has no home marker")
        elif self.home is None:
            raise ValueError(f"{self.kind} agent {self.alias} needs a home marker")


def orders_from_scenario(scenario: Scenario) -> list[TransportOrder]:
    """One order per scenario customer, ids derived from customer labels."""
    return [
        TransportOrder(
            order_id=f"order-{cust.label}",
            carrier=cust.carrier,
            customer=cust.label,
            destination=cust.marker,
            demand=cust.demand,
        )
        for cust in scenario.customers
    ]


def roster_from_scenario(scenario: Scenario) -> list[AgentSpec]:
    """All agents of a scenario: orchestrator, depots, trucks, customers."""
    roster = [AgentSpec(alias=ORCHESTRATOR_ALIAS, kind="orchestrator")]
    for depot in scenario.depots:
        roster.append(AgentSpec(alias=depot.label, kind="depot", home=depot.marker))
        for truck in depot.trucks:
            roster.append(
                AgentSpec(
                    alias=truck.alias,
                    kind="truck",
                    home=depot.marker,
                    capacity=truck.capacity,
                    carrier=depot.label,
                )
            )
    for cust in scenario.customers:
        roster.append(
            AgentSpec(alias=cust.label, kind="customer", home=cust.marker, carrier=cust.carrier)
        )
    return roster

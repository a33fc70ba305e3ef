"""Scenario files: the JSON description of one collaboration instance.

A scenario fixes the map (removed edges, single-track stretches), the
depots with their truck fleets, the customers with demand and owning
carrier, and the motion timing constants. Unknown keys are rejected so a
typo fails loudly instead of silently configuring nothing.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .grid import GridMap, build_map

ALIAS_PATTERN = r"^[A-Za-z0-9_-]{1,64}$"


class ScenarioError(Exception):
    """Raised when a scenario file is malformed or internally inconsistent."""


class GridSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    width: int = Field(default=5, ge=2)
    height: int = Field(default=5, ge=2)
    removed_edges: list[tuple[int, int]] = Field(default_factory=list)
    single_track: list[list[tuple[int, int]]] = Field(default_factory=list)


class TruckSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alias: str = Field(pattern=ALIAS_PATTERN)
    capacity: int = Field(ge=1)


class DepotSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    label: str = Field(pattern=ALIAS_PATTERN)
    marker: int = Field(ge=0)
    trucks: list[TruckSpec] = Field(min_length=1)


class CustomerSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    label: str = Field(pattern=ALIAS_PATTERN)
    marker: int = Field(ge=0)
    demand: int = Field(ge=1)
    carrier: str = Field(pattern=ALIAS_PATTERN)


class TimingSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    edge_ticks: int = Field(default=1, ge=1)
    service_ticks: int = Field(default=2, ge=1)


class Scenario(BaseModel):
    model_config = ConfigDict(extra="forbid")

    grid: GridSpec = Field(default_factory=GridSpec)
    depots: list[DepotSpec] = Field(min_length=1)
    customers: list[CustomerSpec] = Field(default_factory=list)
    timing: TimingSpec = Field(default_factory=TimingSpec)

    @field_validator("depots")
    @classmethod
    def _unique_depot_names(cls, depots: list[DepotSpec]) -> list[DepotSpec]:
        seen: set[str] = set()
        for depot in depots:
            for name in (depot.label, *(t.alias for t in depot.trucks)):
                if name in seen:
                    raise ValueError(f"duplicate agent name {name!r}")
                seen.add(name)
        return depots

    def validate_connected(self) -> GridMap:
        """Cross-field checks that need the assembled map; returns the map."""
        grid = self.build_map()
        depot_labels = {d.label for d in self.depots}
        names = depot_labels | {t.alias for d in self.depots for t in d.trucks}
        taken_markers: dict[int, str] = {d.marker: d.label for d in self.depots}
        if len(taken_markers) != len(self.depots):
            raise ScenarioError("two depots share one marker")
        capacities = {d.label: max(t.capacity for t in d.trucks) for d in self.depots}
        for cust in self.customers:
            if cust.label in names:
                raise ScenarioError(f"duplicate agent name {cust.label!r}")
            names.add(cust.label)
            if cust.carrier not in depot_labels:
                raise ScenarioError(f"customer {cust.label} names unknown carrier {cust.carrier}")
            if cust.marker in taken_markers:
                raise ScenarioError(
                    f"customer {cust.label} shares marker {cust.marker} with {taken_markers[cust.marker]}"
                )
            taken_markers[cust.marker] = cust.label
            if cust.demand > capacities[cust.carrier]:
                raise ScenarioError(
                    f"customer {cust.label} demand {cust.demand} exceeds every "
                    f"truck of carrier {cust.carrier}"
                )
        return grid

    def build_map(self) -> GridMap:
        labels = {d.marker: d.label for d in self.depots}
        labels.update({c.marker: c.label for c in self.customers})
        segments = {
            f"S{i + 1}": edges for i, edges in enumerate(self.grid.single_track)
        }
        try:
            return build_map(
                width=self.grid.width,
                height=self.grid.height,
                removed_edges=self.grid.removed_edges,
                segments=segments,
                node_labels=labels,
            )
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc

    def truck_home(self, alias: str) -> int:
        for depot in self.depots:
            for truck in depot.trucks:
                if truck.alias == alias:
                    return depot.marker
        raise KeyError(alias)

    def carrier_of_truck(self, alias: str) -> str:
        for depot in self.depots:
            if any(t.alias == alias for t in depot.trucks):
                return depot.label
        raise KeyError(alias)

    def digest(self) -> str:
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def parse_scenario(data: Any) -> Scenario:
    try:
        scenario = Scenario.model_validate(data)
    except ValidationError as exc:
        raise ScenarioError(_summarize_validation(exc)) from exc
    scenario.validate_connected()
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ScenarioError(f"scenario file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario file {path} is not valid JSON: {exc}")
    return parse_scenario(data)


def _summarize_validation(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors()[:5]:
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "invalid scenario: " + "; ".join(parts)

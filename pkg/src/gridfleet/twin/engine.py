"""Deterministic run engine: one scenario, one world, one message bus and
a roster of agent behaviors, advanced tick by tick by a single writer.

Each tick: the world advances whatever is in motion, finish events go to
their trucks, the bus drains to quiescence, every agent gets a proactive
step in ascending alias order, and the bus drains again. Truck state
changes are then diffed into the frame log. With the simulated clock,
counter-based message ids and tick-derived timestamps, two runs of the
same scenario produce byte-identical logs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from ..agents.base import AgentContext, Behavior, ProtocolSettings
from ..agents.factory import build_behavior
from ..agents.model import roster_from_scenario
from ..gridworld.grid import GridMap
from ..gridworld.scenario import Scenario
from ..gridworld.world import TruckPhase, World
from ..messaging.bus import InProcessBus
from ..messaging.envelope import INFORM, REQUEST, Envelope
from .records import COMPLETED, FAILED, RUNNING
from .store import RunStore


@dataclass
class EngineSettings:
    seed: int = 0
    max_ticks: int = 10_000
    confirm_timeout_ticks: int | None = None
    confirm_retry_limit: int = 3
    prefer_exact: bool = True
    tick_delay_s: float = 0.0  # wall pause per tick, for watchable runs


class SimContext(AgentContext):
    def __init__(self, engine: "RunEngine", alias: str):
        self._engine = engine
        self.alias = alias
        self.settings = ProtocolSettings(
            confirm_timeout_ticks=engine.settings.confirm_timeout_ticks,
            confirm_retry_limit=engine.settings.confirm_retry_limit,
        )

    def now(self) -> int:
        return self._engine.world.tick_no

    # messaging
    def request(self, to: str, msg_type: str, payload: dict) -> str:
        env = self._engine.bus.make_envelope(self.alias, to, REQUEST, msg_type, payload)
        self._engine.bus.post(env)
        return env.msg_id

    def inform(self, to, msg_type, payload, correlation_id=None) -> None:
        env = self._engine.bus.make_envelope(
            self.alias, to, INFORM, msg_type, payload, correlation_id=correlation_id
        )
        self._engine.bus.post(env)

    def reply(self, original: Envelope, performative: str, msg_type: str, payload: dict) -> None:
        env = self._engine.bus.make_envelope(
            self.alias,
            original.sender,
            performative,
            msg_type,
            payload,
            correlation_id=original.msg_id,
        )
        self._engine.bus.post(env)

    # world
    def grid(self) -> GridMap:
        return self._engine.world.grid

    def truck_position(self) -> int:
        return self._engine.world.truck(self.alias).at

    def is_traversing(self) -> bool:
        return self._engine.world.truck(self.alias).target is not None

    def set_phase(self, phase: TruckPhase) -> None:
        self._engine.world.set_phase(self.alias, phase)

    def set_cargo(self, units: int) -> None:
        self._engine.world.truck(self.alias).cargo = units

    def adjust_cargo(self, delta: int) -> None:
        self._engine.world.truck(self.alias).cargo += delta

    def begin_edge(self, target: int) -> None:
        self._engine.world.begin_edge(self.alias, target)

    def begin_service(self) -> None:
        self._engine.world.begin_service(self.alias)

    def claim_segment(self, segment: str) -> bool:
        return self._engine.world.claim_segment(self.alias, segment)

    def release_segment(self, segment: str) -> None:
        self._engine.world.release_segment(self.alias, segment)

    # twin hooks
    def delivery_completed(self, order_id: str, customer: str, marker: int) -> None:
        self._engine.record_delivery(self.alias, order_id, customer, marker)

    def plans_ready(self, pre, post) -> None:
        self._engine.record_plans(pre, post)

    def report_ready(self, report: dict) -> None:
        self._engine.record_report(report)

    def fail_run(self, reason: str) -> None:
        self._engine.flag_failure(reason)


class RunEngine:
    def __init__(
        self,
        scenario: Scenario,
        store: RunStore,
        run_id: str,
        settings: EngineSettings | None = None,
    ):
        self.scenario = scenario
        self.store = store
        self.run_id = run_id
        self.settings = settings or EngineSettings()
        self.grid = scenario.build_map()
        self.world = World(
            self.grid,
            edge_ticks=scenario.timing.edge_ticks,
            service_ticks=scenario.timing.service_ticks,
        )
        self.bus = InProcessBus(clock=lambda: self.world.tick_no)
        self.bus.on_send = self._message_sent
        self.behaviors: dict[str, Behavior] = {}
        self.contexts: dict[str, SimContext] = {}
        self.report: dict | None = None
        self.failure: str | None = None
        self._last_truck_view: dict[str, tuple] = {}
        self._build_agents()

    # -- construction ------------------------------------------------------------

    def _build_agents(self) -> None:
        roster = roster_from_scenario(self.scenario)
        # active non-truck agents are registered before any truck connects
        ordered = [s for s in roster if s.kind != "truck"] + [
            s for s in roster if s.kind == "truck"
        ]
        for spec in ordered:
            behavior = build_behavior(spec, self.scenario, self.settings.prefer_exact)
            ctx = SimContext(self, spec.alias)
            self.behaviors[spec.alias] = behavior
            self.contexts[spec.alias] = ctx
            # dynamic lookup, so a behavior can be swapped out before run()
            self.bus.register(
                spec.alias,
                spec.kind,
                lambda env, a=spec.alias: self.behaviors[a].on_message(env, self.contexts[a]),
            )
            if spec.kind == "truck":
                self.world.add_truck(spec.alias, spec.home)
        self._agent_order = [s.alias for s in ordered]

    # -- frame hooks ---------------------------------------------------------------

    def _message_sent(self, env: Envelope) -> None:
        self.store.append_message(self.run_id, env)
        self.store.append_frame(
            self.run_id,
            tick=self.world.tick_no,
            kind="message_sent",
            payload={"envelope": env.model_dump(mode="json")},
        )

    def record_delivery(self, truck: str, order_id: str, customer: str, marker: int) -> None:
        tick = self.world.tick_no
        self.store.append_frame(
            self.run_id,
            tick=tick,
            kind="delivery_completed",
            payload={"order_id": order_id, "customer": customer, "truck": truck, "marker": marker},
        )
        self.store.append_frame(
            self.run_id,
            tick=tick,
            kind="milestone",
            payload={"text": f"{truck} delivered order {order_id} to {customer}", "truck": truck},
        )

    def record_plans(self, pre, post) -> None:
        self.store.set_plans(self.run_id, pre, post)

    def record_report(self, report: dict) -> None:
        self.report = dict(report)
        self.store.set_reduction(self.run_id, report)

    def flag_failure(self, reason: str) -> None:
        if self.failure is None:
            self.failure = reason

    def _emit_truck_diffs(self) -> None:
        for alias in sorted(self.world.trucks):
            state = self.world.trucks[alias]
            view = (state.at, state.phase.value, state.cargo)
            if self._last_truck_view.get(alias) != view:
                self._last_truck_view[alias] = view
                self.store.append_frame(
                    self.run_id,
                    tick=self.world.tick_no,
                    kind="truck_moved",
                    payload={
                        "truck": alias,
                        "at": state.at,
                        "phase": state.phase.value,
                        "cargo": state.cargo,
                    },
                )

    # -- run loop -------------------------------------------------------------------

    def _all_trucks_done(self) -> bool:
        return all(t.phase is TruckPhase.DONE for t in self.world.trucks.values())

    def _finished(self) -> bool:
        return self.failure is not None or (self.report is not None and self._all_trucks_done())

    def setup(self) -> None:
        """Tick 0: agents come up, submit orders, receive plans and tasks."""
        self.store.set_status(self.run_id, RUNNING)
        self.store.set_ticks(self.run_id, started=0)
        # seed the diff tracker so only post-setup changes produce frames
        for alias in sorted(self.world.trucks):
            state = self.world.trucks[alias]
            self._last_truck_view[alias] = (state.at, state.phase.value, state.cargo)
        for alias in self._agent_order:
            self.behaviors[alias].on_start(self.contexts[alias])
        self.bus.drain()
        self._proactive_round()
        self._emit_truck_diffs()

    def _proactive_round(self) -> None:
        for alias in self._agent_order:
            self.behaviors[alias].on_tick(self.contexts[alias])
        self.bus.drain()

    def tick(self) -> None:
        events = self.world.tick()
        for event in events:
            behavior = self.behaviors.get(event.truck)
            if behavior is not None:
                behavior.on_world_event(event, self.contexts[event.truck])
        self.bus.drain()
        self._proactive_round()
        self._emit_truck_diffs()

    def run(self) -> dict:
        self.setup()
        while not self._finished():
            if self.world.tick_no >= self.settings.max_ticks:
                self.flag_failure(f"run exceeded {self.settings.max_ticks} ticks")
                break
            if self.settings.tick_delay_s > 0:
                time.sleep(self.settings.tick_delay_s)
            self.tick()
        return self.finalize()

    def finalize(self) -> dict:
        self.world.mark_completed()
        status = FAILED if self.failure is not None else COMPLETED
        self.store.set_ticks(self.run_id, ended=self.world.tick_no)
        self.store.append_frame(
            self.run_id,
            tick=self.world.tick_no,
            kind="run_completed",
            payload={
                "status": status,
                "reduction": self.report,
                "error": self.failure,
            },
        )
        self.store.set_status(self.run_id, status, error=self.failure)
        return self.store.summary(self.run_id)


def execute_run(
    scenario: Scenario,
    store: RunStore,
    run_id: str | None = None,
    settings: EngineSettings | None = None,
) -> dict:
    """Create a run in the store and drive it to completion."""
    seed = settings.seed if settings is not None else 0
    rid = store.create_run(scenario, run_id=run_id, seed=seed)
    engine = RunEngine(scenario, store, rid, settings)
    return engine.run()

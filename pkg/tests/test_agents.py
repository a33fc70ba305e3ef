from __future__ import annotations

import pytest

from gridfleet.agents import (
    CustomerBehavior,
    IncompleteRun,
    OrchestratorBehavior,
    project_truck_transcript,
    transcript_conforms,
)
from gridfleet.agents.base import AgentContext, ProtocolSettings
from gridfleet.agents.model import AgentSpec
from gridfleet.gridworld.scenario import parse_scenario
from gridfleet.twin import EngineSettings, RunEngine, RunStore


class RecordingContext(AgentContext):
    """Minimal context capturing outbound traffic for behavior unit tests."""

    def __init__(self, alias: str):
        self.alias = alias
        self.settings = ProtocolSettings()
        self.sent: list[tuple] = []

    def now(self) -> int:
        return 0

    def reply(self, original, performative, msg_type, payload):
        self.sent.append(("reply", original.msg_id, performative, msg_type, payload))

    def request(self, to, msg_type, payload):
        self.sent.append(("request", to, msg_type, payload))
        return f"m-{len(self.sent):06d}"

    def inform(self, to, msg_type, payload, correlation_id=None):
        self.sent.append(("inform", to, msg_type, payload))


def notice_env(order_id: str, recipient: str):
    from gridfleet.messaging import Envelope

    return Envelope(
        msg_id="m-000001",
        sender="T1",
        recipient=recipient,
        performative="request",
        msg_type="NoticeOfArrival",
        payload={"order_id": order_id, "truck": "T1", "marker": 6},
    )


class TestCustomer:
    def make(self) -> tuple[CustomerBehavior, RecordingContext]:
        spec = AgentSpec(alias="C5", kind="customer", home=6, carrier="D1")
        return CustomerBehavior(spec, expected_orders={"order-C5"}), RecordingContext("C5")

    def test_confirms_own_order(self):
        customer, ctx = self.make()
        customer.on_message(notice_env("order-C5", "C5"), ctx)
        kind, _, performative, msg_type, payload = ctx.sent[0]
        assert (performative, msg_type) == ("confirm", "ConfirmationOfReceipt")
        assert payload["order_id"] == "order-C5"

    def test_refuses_foreign_order(self):
        customer, ctx = self.make()
        customer.on_message(notice_env("order-C9", "C5"), ctx)
        assert ctx.sent[0][2] == "refuse"

    def test_duplicate_notice_confirmed_again(self):
        customer, ctx = self.make()
        customer.on_message(notice_env("order-C5", "C5"), ctx)
        customer.on_message(notice_env("order-C5", "C5"), ctx)
        assert [s[2] for s in ctx.sent] == ["confirm", "confirm"]
        assert customer.confirmed == ["order-C5"]


def bridge_scenario(**overrides) -> dict:
    """Two chambers joined by a single-track bridge 7-12-17.

    All other west-east crossings are cut, demands pin each order to one
    specific truck, and each truck's only customer sits on the far side,
    so both trucks must cross the one-lane bridge in opposite directions.
    """
    data = {
        "grid": {
            "width": 5,
            "height": 5,
            "removed_edges": [
                [5, 10], [6, 11], [8, 13], [9, 14],
                [10, 15], [11, 16], [13, 18], [14, 19],
            ],
            "single_track": [[[7, 12], [12, 17]]],
        },
        "depots": [
            {"label": "D1", "marker": 6, "trucks": [{"alias": "T1", "capacity": 2}]},
            {"label": "D2", "marker": 18, "trucks": [{"alias": "T2", "capacity": 1}]},
        ],
        "customers": [
            {"label": "C1", "marker": 16, "demand": 2, "carrier": "D1"},
            {"label": "C2", "marker": 8, "demand": 1, "carrier": "D2"},
        ],
        "timing": {"edge_ticks": 1, "service_ticks": 2},
    }
    data.update(overrides)
    return data


def run_engine(data: dict, settings: EngineSettings | None = None, tweak=None):
    scenario = parse_scenario(data)
    store = RunStore()
    run_id = store.create_run(scenario)
    engine = RunEngine(scenario, store, run_id, settings)
    if tweak is not None:
        tweak(engine)
    occupancy_violations = []
    engine.setup()
    while not engine._finished() and engine.world.tick_no < engine.settings.max_ticks:
        engine.tick()
        for segment, occupants in engine.world.occupied_segments().items():
            if len(occupants) > 1:
                occupancy_violations.append((engine.world.tick_no, segment, occupants))
    summary = engine.finalize()
    assert not occupancy_violations, occupancy_violations
    return engine, store, summary


class TestSegmentProtocol:
    def test_opposing_trucks_never_overlap_and_conform(self):
        engine, store, summary = run_engine(bridge_scenario())
        assert summary["status"] == "completed"
        messages = store.message_log(summary["run_id"])
        for truck in ("T1", "T2"):
            transcript = project_truck_transcript(messages, truck)
            stops = len(store.summary(summary["run_id"])["plan_post"]["tours"][truck]["stops"])
            assert transcript_conforms(transcript, stops), transcript
        claims = [e for e in messages if e.msg_type == "SegmentClaim"]
        releases = [e for e in messages if e.msg_type == "SegmentRelease"]
        assert claims and releases

    def test_simultaneous_claims_favor_lower_alias(self):
        engine, store, summary = run_engine(bridge_scenario())
        claims = [e for e in store.message_log(summary["run_id"]) if e.msg_type == "SegmentClaim"]
        # both trucks reach the column entrance on the same tick; T1 wins
        assert claims[0].sender == "T1"

    def test_waiting_truck_proceeds_after_release(self):
        engine, store, summary = run_engine(bridge_scenario())
        messages = store.message_log(summary["run_id"])
        t1_release = next(
            i for i, e in enumerate(messages)
            if e.msg_type == "SegmentRelease" and e.sender == "T1"
        )
        t2_claim = next(
            i for i, e in enumerate(messages)
            if e.msg_type == "SegmentClaim" and e.sender == "T2"
        )
        assert t2_claim > t1_release


class TestFailurePaths:
    def test_refusing_customer_marks_stop_failed_and_run_completes(self):
        class RefusingCustomer(CustomerBehavior):
            def on_message(self, env, ctx):
                ctx.reply(env, "refuse", "Error", {"error": "not today"})

        def tweak(engine: RunEngine):
            spec = engine.behaviors["C1"].spec
            engine.behaviors["C1"] = RefusingCustomer(spec, expected_orders=set())

        engine, store, summary = run_engine(bridge_scenario(), tweak=tweak)
        assert summary["status"] == "completed"
        truck = engine.behaviors["T1"]
        assert truck.failed == ["order-C1"]
        assert truck.served == []
        reports = [
            e
            for e in store.message_log(summary["run_id"])
            if e.msg_type == "FulfilmentComplete" and e.sender == "T1"
        ]
        assert reports[0].payload["failed_orders"] == ["order-C1"]
        # failed stops do not produce delivery frames
        deliveries = store.live_snapshot(summary["run_id"])["deliveries"]
        assert all(d["order_id"] != "order-C1" for d in deliveries)

    def test_silent_customer_exhausts_retries(self):
        class SilentCustomer(CustomerBehavior):
            def on_message(self, env, ctx):
                pass

        def tweak(engine: RunEngine):
            spec = engine.behaviors["C1"].spec
            engine.behaviors["C1"] = SilentCustomer(spec, expected_orders=set())

        settings = EngineSettings(confirm_timeout_ticks=3, confirm_retry_limit=3)
        engine, store, summary = run_engine(bridge_scenario(), settings, tweak)
        assert summary["status"] == "completed"
        notices = [
            e
            for e in store.message_log(summary["run_id"])
            if e.msg_type == "NoticeOfArrival" and e.sender == "T1"
        ]
        # one initial attempt plus three retries, then the stop is written off
        assert len(notices) == 4
        assert engine.behaviors["T1"].failed == ["order-C1"]

    def test_pooled_orders_can_be_infeasible(self):
        data = bridge_scenario()
        data["depots"][0]["trucks"][0]["capacity"] = 2
        data["depots"][1]["trucks"][0]["capacity"] = 2
        data["customers"] = [
            {"label": "C1", "marker": 8, "demand": 2, "carrier": "D1"},
            {"label": "C2", "marker": 5, "demand": 2, "carrier": "D1"},
            {"label": "C3", "marker": 16, "demand": 2, "carrier": "D2"},
        ]
        engine, store, summary = run_engine(data)
        assert summary["status"] == "failed"
        assert "infeasible" in summary["error"]


class TestZeroStopTask:
    def test_truck_without_orders_never_moves(self):
        data = bridge_scenario()
        # both customers sit in D1's chamber and fit its truck; serving
        # either from across the bridge could never pay off, so T2 idles
        data["depots"][0]["trucks"][0]["capacity"] = 3
        data["customers"] = [
            {"label": "C1", "marker": 5, "demand": 1, "carrier": "D1"},
            {"label": "C2", "marker": 8, "demand": 1, "carrier": "D1"},
        ]
        engine, store, summary = run_engine(data)
        assert summary["status"] == "completed"
        messages = store.message_log(summary["run_id"])
        t2 = project_truck_transcript(messages, "T2")
        assert t2 == ["TransportTask", "DepotArrival", "FulfilmentComplete"]
        assert transcript_conforms(t2, 0)
        moves = [
            f
            for f in store.frames_since(summary["run_id"])
            if f.kind == "truck_moved" and f.payload["truck"] == "T2" and f.payload["at"] != 18
        ]
        assert moves == []


class TestOrchestratorReport:
    def test_report_before_completion_raises(self):
        spec = AgentSpec(alias="orchestrator", kind="orchestrator")
        orchestrator = OrchestratorBehavior(spec, fleet=[], customers=set())
        from gridfleet.solver import FleetTruck

        orchestrator.fleet = [FleetTruck(alias="T1", depot=0, capacity=3, carrier="D1")]
        with pytest.raises(IncompleteRun):
            orchestrator.build_report()

    def test_every_order_served_exactly_once(self, showcase):
        store = RunStore()
        run_id = store.create_run(showcase)
        engine = RunEngine(showcase, store, run_id)
        engine.run()
        stops = []
        for tour in store.summary(run_id)["plan_post"]["tours"].values():
            stops.extend(order_id for _, order_id in tour["stops"])
        assert sorted(stops) == sorted(f"order-{c.label}" for c in showcase.customers)
        served = [d["order_id"] for d in store.live_snapshot(run_id)["deliveries"]]
        assert sorted(served) == sorted(stops)

"""Networked agent endpoint: one TCP listener per agent, envelopes as
length-prefixed JSON, discovery through the nameserver with the NDS as
the fallback of record.

Each node is a sequential actor: every unit of work (inbound envelope,
reply delivery, clock tick, startup) runs to completion on a single
logical queue, so behavior code sees exactly the ordering guarantees it
gets under the in-process engine. Outbound requests block for their
reply, which is then queued for dispatch; replies to inbound requests are
released to the wire the moment the behavior produces them.

Peer endpoints are cached after the first resolution and re-resolved
through the nameserver-of-record (found via the NDS nickname) when a send
fails, so agents ride out a nameserver restart on a new port without any
address edits. A registration heartbeat repopulates a freshly restarted
nameserver's table.
"""

from __future__ import annotations

import socketserver
import threading
import time
import uuid
from collections import deque
from dataclasses import dataclass

from ..agents.base import AgentContext, ProtocolSettings
from ..agents.factory import build_behavior
from ..orders import AgentSpec
from ..gridworld.scenario import Scenario
from ..gridworld.world import TruckPhase, World
from .bus import MessagingError, NotFound, RequestTimeout, Unresolvable, forbidden_pair
from .discovery import DiscoveryClient, NdsClient
from .envelope import CONFIRM, INFORM, REFUSE, REQUEST, Envelope, PayloadError, validate_payload
from .transport import TransportError, recv_frame, roundtrip, send_frame


@dataclass
class NodeTimings:
    tick_seconds: float = 0.05
    request_timeout: float = 30.0
    heartbeat_seconds: float = 2.0
    resolve_retries: int = 40
    resolve_backoff: float = 0.05


class _ReplySlot:
    def __init__(self) -> None:
        self.event = threading.Event()
        self.envelope: Envelope | None = None


class _EnvelopeRequestHandler(socketserver.BaseRequestHandler):
    def handle(self) -> None:
        node: AgentNode = self.server.node  # type: ignore[attr-defined]
        try:
            frame = recv_frame(self.request)
        except (TransportError, ValueError):
            return
        try:
            response = node.handle_wire(frame)
        except Exception as exc:  # keep the listener alive whatever happens
            response = {"kind": "error", "error": str(exc)}
        try:
            send_frame(self.request, response)
        except OSError:
            pass


class _NodeServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


class AgentNode:
    def __init__(
        self,
        spec: AgentSpec,
        scenario: Scenario,
        nds_url: str,
        roster_kinds: dict[str, str],
        host: str = "127.0.0.1",
        port: int = 0,
        timings: NodeTimings | None = None,
        prefer_exact: bool = True,
    ):
        self.spec = spec
        self.scenario = scenario
        self.timings = timings or NodeTimings()
        self.roster_kinds = dict(roster_kinds)
        self.behavior = build_behavior(spec, scenario, prefer_exact=prefer_exact)
        self._server = _NodeServer((host, port), _EnvelopeRequestHandler)
        self._server.node = self  # type: ignore[attr-defined]
        self.endpoint = f"{host}:{self._server.server_address[1]}"
        self.discovery = DiscoveryClient(NdsClient(nds_url), spec.alias, self.endpoint)
        self.ctx = NetContext(self)
        self._work: deque = deque()
        self._work_ready = threading.Condition()
        self._endpoint_cache: dict[str, str] = {}
        self._threads: list[threading.Thread] = []
        self._stopping = threading.Event()
        self.world: World | None = None
        if spec.kind == "truck":
            self.world = World(scenario.build_map(), edge_ticks=1, service_ticks=2)
            self.world.add_truck(spec.alias, spec.home)

    @property
    def alias(self) -> str:
        return self.spec.alias

    # -- lifecycle ---------------------------------------------------------------

    def start(self) -> "AgentNode":
        for target in filter(None, (
            self._server.serve_forever,
            self._worker_loop,
            self._heartbeat_loop,
            self._tick_loop if self.world is not None else None,
        )):
            thread = threading.Thread(target=target, daemon=True)
            thread.start()
            self._threads.append(thread)
        self.discovery.register_self()
        return self

    def kick(self) -> None:
        """Run the behavior's startup step (e.g. a depot submitting orders)."""
        self._execute(lambda: self.behavior.on_start(self.ctx))

    def stop(self) -> None:
        self._stopping.set()
        self._server.shutdown()
        self._server.server_close()
        self.discovery.nds.close()

    def _heartbeat_loop(self) -> None:
        while not self._stopping.wait(self.timings.heartbeat_seconds):
            try:
                self.discovery.register_self()
            except Exception:
                pass  # the nameserver may be mid-restart; next beat retries

    def _tick_loop(self) -> None:
        while not self._stopping.wait(self.timings.tick_seconds):
            if getattr(self.behavior, "done", False):
                continue
            self._execute(self._tick_once)

    def _tick_once(self) -> None:
        assert self.world is not None
        for event in self.world.tick():
            self.behavior.on_world_event(event, self.ctx)
        self.behavior.on_tick(self.ctx)

    # -- sequential executor -------------------------------------------------------
    #
    # All behavior code runs on the one worker thread, in enqueue order, so
    # handler execution is serialized while listener threads stay free to
    # ship replies as soon as the behavior produces them.

    def _execute(self, fn) -> None:
        with self._work_ready:
            self._work.append(fn)
            self._work_ready.notify()

    def _worker_loop(self) -> None:
        while not self._stopping.is_set():
            with self._work_ready:
                if not self._work:
                    self._work_ready.wait(timeout=0.1)
                    continue
                job = self._work.popleft()
            try:
                job()
            except Exception:
                pass  # a broken handler must not kill the actor

    # -- inbound -----------------------------------------------------------------

    def handle_wire(self, frame: dict) -> dict:
        if frame.get("kind") != "envelope":
            return {"kind": "error", "error": f"unexpected frame kind {frame.get('kind')!r}"}
        try:
            env = Envelope.model_validate(frame["envelope"])
        except Exception as exc:
            return {"kind": "error", "error": f"bad envelope: {exc}"}
        refusal = self._vet(env)
        if refusal is not None:
            if env.performative in (CONFIRM, REFUSE):
                return {"kind": "ack"}
            return {"kind": "reply", "envelope": refusal.model_dump(mode="json")}
        if env.performative == REQUEST:
            slot = _ReplySlot()
            self._execute(lambda: self._dispatch(env, slot))
            if not slot.event.wait(self.timings.request_timeout):
                fallback = self._make_envelope(
                    env.sender, REFUSE, "Error", {"error": "request not answered in time"}, env.msg_id
                )
                return {"kind": "reply", "envelope": fallback.model_dump(mode="json")}
            assert slot.envelope is not None
            return {"kind": "reply", "envelope": slot.envelope.model_dump(mode="json")}
        self._execute(lambda: self._dispatch(env, None))
        return {"kind": "ack"}

    def _vet(self, env: Envelope) -> Envelope | None:
        sender_kind = self.roster_kinds.get(env.sender)
        my_kind = self.spec.kind
        if forbidden_pair(sender_kind, my_kind):
            return self._make_envelope(
                env.sender,
                REFUSE,
                "Error",
                {"error": f"direct {sender_kind}-{my_kind} messaging is disabled"},
                env.msg_id,
            )
        try:
            validate_payload(env.msg_type, env.payload)
        except PayloadError as exc:
            return self._make_envelope(env.sender, REFUSE, "Error", {"error": str(exc)}, env.msg_id)
        return None

    def _dispatch(self, env: Envelope, slot: _ReplySlot | None) -> None:
        self.ctx._reply_slots.append(slot)
        try:
            self.behavior.on_message(env, self.ctx)
        finally:
            pending = self.ctx._reply_slots.pop()
            if pending is not None and not pending.event.is_set():
                pending.envelope = self._make_envelope(
                    env.sender,
                    REFUSE,
                    "Error",
                    {"error": f"{self.alias} had no answer for {env.msg_type}"},
                    env.msg_id,
                )
                pending.event.set()

    # -- outbound ----------------------------------------------------------------

    def _make_envelope(
        self,
        recipient: str,
        performative: str,
        msg_type: str,
        payload: dict,
        correlation_id: str | None = None,
    ) -> Envelope:
        tick = self.world.tick_no if self.world is not None else 0
        return Envelope(
            msg_id=f"{self.alias}-{uuid.uuid4().hex[:12]}",
            correlation_id=correlation_id,
            sender=self.alias,
            recipient=recipient,
            performative=performative,
            msg_type=msg_type,
            payload=payload,
            sim_tick=tick,
            sent_at=time.time(),
        )

    def _resolve(self, alias: str) -> str:
        cached = self._endpoint_cache.get(alias)
        if cached is not None:
            return cached
        last_error: Exception = Unresolvable(f"never resolved {alias!r}")
        for _ in range(self.timings.resolve_retries):
            try:
                endpoint = self.discovery.resolve(alias)
                self._endpoint_cache[alias] = endpoint
                return endpoint
            except (Unresolvable, NotFound) as exc:
                # peer may not have re-registered yet after a nameserver
                # restart; give the heartbeat a moment and try again
                last_error = exc
                time.sleep(self.timings.resolve_backoff)
        raise last_error

    def _transmit(self, env: Envelope) -> dict:
        attempts = 0
        while True:
            attempts += 1
            endpoint = self._resolve(env.recipient)
            try:
                return roundtrip(
                    endpoint,
                    {"kind": "envelope", "envelope": env.model_dump(mode="json")},
                    timeout=self.timings.request_timeout,
                )
            except (OSError, TransportError) as exc:
                self._endpoint_cache.pop(env.recipient, None)
                if attempts >= 3:
                    raise Unresolvable(f"{env.recipient} unreachable at {endpoint}: {exc}") from exc

    def send_request(self, to: str, msg_type: str, payload: dict) -> str:
        env = self._make_envelope(to, REQUEST, msg_type, payload)
        answer = self._transmit(env)
        if answer.get("kind") == "reply":
            reply = Envelope.model_validate(answer["envelope"])
            self._execute(lambda: self.behavior.on_message(reply, self.ctx))
        elif answer.get("kind") == "error":
            raise MessagingError(answer.get("error", "remote error"))
        else:
            raise RequestTimeout(f"no reply envelope from {to}")
        return env.msg_id

    def send_inform(self, to: str, msg_type: str, payload: dict, correlation_id=None) -> None:
        env = self._make_envelope(to, INFORM, msg_type, payload, correlation_id)
        self._transmit(env)


class NetContext(AgentContext):
    def __init__(self, node: AgentNode):
        self._node = node
        self.alias = node.alias
        self.settings = ProtocolSettings(confirm_timeout_ticks=None)
        self._reply_slots: list[_ReplySlot | None] = []

    def now(self) -> int:
        return self._node.world.tick_no if self._node.world is not None else 0

    def request(self, to: str, msg_type: str, payload: dict) -> str:
        return self._node.send_request(to, msg_type, payload)

    def inform(self, to, msg_type, payload, correlation_id=None) -> None:
        self._node.send_inform(to, msg_type, payload, correlation_id)

    def reply(self, original: Envelope, performative: str, msg_type: str, payload: dict) -> None:
        env = self._node._make_envelope(
            original.sender, performative, msg_type, payload, original.msg_id
        )
        slot = self._reply_slots[-1] if self._reply_slots else None
        if slot is not None:
            slot.envelope = env
            slot.event.set()  # release the waiting connection right away
        # replies without a live slot (e.g. to a locally delivered reply)
        # have nowhere to go; the protocol never produces them

    # -- private world (trucks) ---------------------------------------------------

    def grid(self):
        return self._node.world.grid

    def truck_position(self) -> int:
        return self._node.world.truck(self.alias).at

    def is_traversing(self) -> bool:
        return self._node.world.truck(self.alias).target is not None

    def set_phase(self, phase: TruckPhase) -> None:
        self._node.world.set_phase(self.alias, phase)

    def set_cargo(self, units: int) -> None:
        self._node.world.truck(self.alias).cargo = units

    def adjust_cargo(self, delta: int) -> None:
        self._node.world.truck(self.alias).cargo += delta

    def begin_edge(self, target: int) -> None:
        self._node.world.begin_edge(self.alias, target)

    def begin_service(self) -> None:
        self._node.world.begin_service(self.alias)

    def claim_segment(self, segment: str) -> bool:
        # best effort without a shared arbiter: trust peer usage notices
        holder = self._node.behavior.peer_claims.get(segment)  # type: ignore[attr-defined]
        if holder not in (None, self.alias):
            return False
        return self._node.world.claim_segment(self.alias, segment)

    def release_segment(self, segment: str) -> None:
        self._node.world.release_segment(self.alias, segment)


def launch_fleet(
    scenario: Scenario,
    nds_url: str,
    timings: NodeTimings | None = None,
    host: str = "127.0.0.1",
) -> dict[str, AgentNode]:
    """Bring up one node per scenario agent, non-truck agents first, then
    run every startup step. The caller owns stopping the nodes."""
    from ..orders import roster_from_scenario

    roster = roster_from_scenario(scenario)
    ordered = [s for s in roster if s.kind != "truck"] + [s for s in roster if s.kind == "truck"]
    kinds = {s.alias: s.kind for s in roster}
    nodes: dict[str, AgentNode] = {}
    try:
        for spec in ordered:
            nodes[spec.alias] = AgentNode(
                spec, scenario, nds_url, kinds, host=host, timings=timings
            ).start()
        for spec in ordered:
            nodes[spec.alias].kick()
    except Exception:
        for node in nodes.values():
            node.stop()
        raise
    return nodes

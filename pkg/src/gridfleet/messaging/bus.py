"""Deterministic in-process message bus for simulated-clock runs.

One global FIFO queue carries every envelope, so delivery order between any
sender-recipient pair is FIFO and a drain of the queue is reproducible.
Message ids are sequence numbers and timestamps derive from the simulated
tick, which keeps whole message logs byte-identical across reruns.

The bus enforces two recipient-side rules before a handler ever runs:
payloads must match their message type's schema, and carriers (depots) and
customers may not talk to each other directly; violations earn the sender
a refuse reply.
"""

from __future__ import annotations

from collections import deque
from typing import Callable

from .envelope import CONFIRM, REFUSE, REQUEST, Envelope, PayloadError, validate_payload


class MessagingError(Exception):
    pass


class Unresolvable(MessagingError):
    """The recipient alias is not registered anywhere we can reach."""


class AliasTaken(MessagingError):
    """Another endpoint already owns this alias."""


class NotFound(MessagingError):
    """Lookup missed: alias or nickname has no entry."""


class RequestTimeout(MessagingError):
    """No reply arrived within the allowed wait."""


_BLOCKED_PAIRS = frozenset({("depot", "customer"), ("customer", "depot")})


def forbidden_pair(sender_kind: str | None, recipient_kind: str | None) -> bool:
    """Carrier-depot and customer agents must not message each other directly."""
    return (sender_kind, recipient_kind) in _BLOCKED_PAIRS


class InProcessBus:
    def __init__(self, clock: Callable[[], int]):
        self._clock = clock
        self._handlers: dict[str, Callable[[Envelope], None]] = {}
        self._kinds: dict[str, str] = {}
        self._queue: deque[Envelope] = deque()
        self._log: list[Envelope] = []
        self._counter = 0
        self._blocking: dict[str, Envelope | None] = {}
        self.on_send: Callable[[Envelope], None] | None = None

    # -- registration --------------------------------------------------------

    def register(self, alias: str, kind: str, handler: Callable[[Envelope], None]) -> None:
        if alias in self._handlers:
            raise AliasTaken(f"alias {alias!r} already registered on this bus")
        self._handlers[alias] = handler
        self._kinds[alias] = kind

    def kind_of(self, alias: str) -> str | None:
        return self._kinds.get(alias)

    @property
    def log(self) -> list[Envelope]:
        return self._log

    # -- sending ---------------------------------------------------------------

    def make_envelope(
        self,
        sender: str,
        recipient: str,
        performative: str,
        msg_type: str,
        payload: dict,
        correlation_id: str | None = None,
    ) -> Envelope:
        self._counter += 1
        tick = self._clock()
        return Envelope(
            msg_id=f"m-{self._counter:06d}",
            correlation_id=correlation_id,
            sender=sender,
            recipient=recipient,
            performative=performative,
            msg_type=msg_type,
            payload=payload,
            sim_tick=tick,
            sent_at=float(tick),
        )

    def post(self, env: Envelope) -> None:
        if env.recipient not in self._handlers and env.correlation_id not in self._blocking:
            raise Unresolvable(f"no agent registered under alias {env.recipient!r}")
        self._log.append(env)
        if self.on_send is not None:
            self.on_send(env)
        self._queue.append(env)

    # -- delivery ----------------------------------------------------------------

    def drain(self) -> int:
        """Deliver queued envelopes (and whatever their handlers send) until
        the queue is empty; returns the number of deliveries."""
        delivered = 0
        guard = 0
        while self._queue:
            guard += 1
            if guard > 100_000:
                raise MessagingError("message storm: drain did not quiesce")
            env = self._queue.popleft()
            self._dispatch(env)
            delivered += 1
        return delivered

    def _dispatch(self, env: Envelope) -> None:
        if env.correlation_id is not None and env.correlation_id in self._blocking:
            self._blocking[env.correlation_id] = env
            return
        handler = self._handlers.get(env.recipient)
        if handler is None:
            # recipient disappeared between post and delivery; nothing to do
            return
        sender_kind = self._kinds.get(env.sender)
        recipient_kind = self._kinds.get(env.recipient)
        if forbidden_pair(sender_kind, recipient_kind):
            self._refuse(env, f"direct {sender_kind}-{recipient_kind} messaging is disabled")
            return
        try:
            validate_payload(env.msg_type, env.payload)
        except PayloadError as exc:
            self._refuse(env, str(exc))
            return
        handler(env)

    def _refuse(self, env: Envelope, reason: str) -> None:
        if env.performative in (CONFIRM, REFUSE):
            return  # never refuse a reply; that way lies ping-pong
        self.post(
            self.make_envelope(
                sender=env.recipient,
                recipient=env.sender,
                performative=REFUSE,
                msg_type="Error",
                payload={"error": reason},
                correlation_id=env.msg_id,
            )
        )

    # -- synchronous convenience ---------------------------------------------------

    def send_request(self, sender: str, to: str, msg_type: str, payload: dict) -> Envelope:
        """Post a request and drain the bus until its reply arrives.

        Simulated time has no wall-clock deadline: if the bus quiesces
        without a reply the request can never be answered and the call
        raises RequestTimeout.
        """
        env = self.make_envelope(sender, to, REQUEST, msg_type, payload)
        self._blocking[env.msg_id] = None
        try:
            self.post(env)
            self.drain()
            reply = self._blocking[env.msg_id]
        finally:
            del self._blocking[env.msg_id]
        if reply is None:
            raise RequestTimeout(f"request {env.msg_id} to {to} was never answered")
        return reply

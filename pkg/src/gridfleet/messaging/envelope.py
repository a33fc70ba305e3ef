"""Typed inter-agent messages.

Every message travels as an Envelope: a performative (request / inform /
confirm / refuse), a message type naming the payload schema, and the
payload itself. Replies carry the correlation id of the request they
answer. On the wire an envelope is one length-prefixed JSON document;
canonical serialization (sorted keys, compact separators) keeps logs
byte-stable.
"""

from __future__ import annotations

import json
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..orders import TransportOrder, TransportTask
from ..gridworld.scenario import ALIAS_PATTERN

REQUEST = "request"
INFORM = "inform"
CONFIRM = "confirm"
REFUSE = "refuse"

Performative = Literal["request", "inform", "confirm", "refuse"]


class PayloadError(Exception):
    """Payload does not match the schema of its message type."""


class Envelope(BaseModel):
    model_config = ConfigDict(extra="forbid")

    msg_id: str
    correlation_id: str | None = None
    sender: str = Field(pattern=ALIAS_PATTERN)
    recipient: str = Field(pattern=ALIAS_PATTERN)
    performative: Performative
    msg_type: str
    payload: dict
    sim_tick: int = 0
    sent_at: float = 0.0

    def canonical(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def to_bytes(self) -> bytes:
        body = self.canonical().encode("utf-8")
        return len(body).to_bytes(4, "big") + body

    @classmethod
    def from_json(cls, text: str | bytes) -> "Envelope":
        return cls.model_validate(json.loads(text))


# -- payload schemas ---------------------------------------------------------


class OrderSubmission(BaseModel):
    """A carrier's batch of delivery orders for the pooling round."""

    model_config = ConfigDict(extra="forbid")

    carrier: str
    orders: list[TransportOrder]


class RouteAssignment(BaseModel):
    """One carrier's slice of the joint plan: only its own trucks' tasks,
    plus the order records those tasks serve (a pooled order may belong to
    another carrier, so tasks alone would not be actionable)."""

    model_config = ConfigDict(extra="forbid")

    carrier: str
    tasks: list[TransportTask]
    orders: list[TransportOrder]


class TaskDispatch(BaseModel):
    model_config = ConfigDict(extra="forbid")

    task: TransportTask
    orders: list[TransportOrder]


class ArrivalNotice(BaseModel):
    model_config = ConfigDict(extra="forbid")

    order_id: str
    truck: str
    marker: int


class ReceiptConfirmation(BaseModel):
    model_config = ConfigDict(extra="forbid")

    order_id: str
    customer: str


class DepotArrivalNotice(BaseModel):
    model_config = ConfigDict(extra="forbid")

    truck: str
    marker: int


class SegmentUsage(BaseModel):
    """A truck announcing that it is taking or freeing a single-track road."""

    model_config = ConfigDict(extra="forbid")

    segment: str
    truck: str


class FulfilmentReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    carrier: str
    truck: str | None = None
    task_id: str | None = None
    failed_orders: list[str] = Field(default_factory=list)


class DistanceSummary(BaseModel):
    model_config = ConfigDict(extra="forbid")

    pre_total: int
    post_total: int
    reduction: int
    relative_reduction: float


class ErrorDetail(BaseModel):
    model_config = ConfigDict(extra="forbid")

    error: str


class Acknowledgement(BaseModel):
    model_config = ConfigDict(extra="forbid")

    note: str = "ok"


PAYLOAD_SCHEMAS: dict[str, type[BaseModel]] = {
    "TransportOrder": OrderSubmission,
    "RoutePlan": RouteAssignment,
    "TransportTask": TaskDispatch,
    "NoticeOfArrival": ArrivalNotice,
    "ConfirmationOfReceipt": ReceiptConfirmation,
    "DepotArrival": DepotArrivalNotice,
    "SegmentClaim": SegmentUsage,
    "SegmentRelease": SegmentUsage,
    "FulfilmentComplete": FulfilmentReport,
    "DistanceReport": DistanceSummary,
    "Ack": Acknowledgement,
    "Error": ErrorDetail,
}

MESSAGE_TYPES = frozenset(PAYLOAD_SCHEMAS)


def validate_payload(msg_type: str, payload: dict) -> BaseModel:
    schema = PAYLOAD_SCHEMAS.get(msg_type)
    if schema is None:
        raise PayloadError(f"unknown message type {msg_type!r}")
    try:
        return schema.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(p) for p in first["loc"]) or "<root>"
        raise PayloadError(f"{msg_type} payload invalid at {loc}: {first['msg']}") from exc

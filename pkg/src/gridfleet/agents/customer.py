"""Customer agent: reactive only. Confirms receipt of arrival notices for
its own orders and turns everything else away."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..messaging.envelope import CONFIRM, Envelope, validate_payload
from .base import AgentContext, Behavior


@dataclass
class CustomerBehavior(Behavior):
    expected_orders: set[str] = field(default_factory=set)

    def __post_init__(self) -> None:
        self.confirmed: list[str] = []

    def on_message(self, env: Envelope, ctx: AgentContext) -> None:
        if env.msg_type != "NoticeOfArrival" or env.performative != "request":
            return
        notice = validate_payload("NoticeOfArrival", env.payload)
        if notice.order_id not in self.expected_orders:
            ctx.reply(
                env,
                "refuse",
                "Error",
                {"error": f"order {notice.order_id} is not addressed to {self.alias}"},
            )
            return
        # duplicate notices are confirmed again: proof of delivery is idempotent
        if notice.order_id not in self.confirmed:
            self.confirmed.append(notice.order_id)
        ctx.reply(
            env,
            CONFIRM,
            "ConfirmationOfReceipt",
            {"order_id": notice.order_id, "customer": self.alias},
        )

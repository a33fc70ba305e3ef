"""Conformance checking for the fulfilment conversation.

A truck's part in a run, projected from the message log, must read: one
task in, any interleaving of road-usage notices with the per-stop
notice/confirmation pairs, then the homecoming announcement and the
completion report.
"""

from __future__ import annotations

import re
from typing import Iterable

from ..messaging.envelope import Envelope

_TOKEN: dict[str, str] = {
    "TransportTask": "T",
    "SegmentClaim": "c",
    "SegmentRelease": "r",
    "NoticeOfArrival": "N",
    "ConfirmationOfReceipt": "C",
    "DepotArrival": "D",
    "FulfilmentComplete": "F",
}

# task, then claims/releases freely interleaved with notice+confirmation
# pairs, then depot arrival and the completion report
_PATTERN = re.compile(r"T(?:c|r|NC)*DF")


def project_truck_transcript(envelopes: Iterable[Envelope], truck: str) -> list[str]:
    """The truck's projected message sequence, as message-type names."""
    out: list[str] = []
    for env in envelopes:
        if env.msg_type == "TransportTask" and env.recipient == truck:
            out.append(env.msg_type)
        elif env.msg_type in ("SegmentClaim", "SegmentRelease") and env.sender == truck:
            out.append(env.msg_type)
        elif env.msg_type == "NoticeOfArrival" and env.sender == truck:
            out.append(env.msg_type)
        elif env.msg_type == "ConfirmationOfReceipt" and env.recipient == truck:
            out.append(env.msg_type)
        elif env.msg_type == "DepotArrival" and env.sender == truck:
            out.append(env.msg_type)
        elif env.msg_type == "FulfilmentComplete" and env.sender == truck:
            out.append(env.msg_type)
    return out


def transcript_conforms(transcript: list[str], stops: int) -> bool:
    """True iff the projected sequence matches the fulfilment pattern with
    exactly ``stops`` notice/confirmation pairs."""
    word = "".join(_TOKEN.get(name, "?") for name in transcript)
    if "?" in word:
        return False
    if not _PATTERN.fullmatch(word):
        return False
    return word.count("N") == stops


def explain_transcript(transcript: list[str], stops: int) -> str:
    word = "".join(_TOKEN.get(name, "?") for name in transcript)
    verdict = "conforms" if transcript_conforms(transcript, stops) else "VIOLATES pattern"
    return f"{word} with {stops} stops: {verdict}"

"""Length-prefixed JSON framing over TCP, shared by the nameserver wire
protocol and networked agent endpoints: 4 bytes big-endian length, then
one UTF-8 JSON document."""

from __future__ import annotations

import json
import socket
from typing import Any

MAX_FRAME = 16 * 1024 * 1024


class TransportError(Exception):
    pass


def send_frame(sock: socket.socket, obj: Any) -> None:
    body = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")
    sock.sendall(len(body).to_bytes(4, "big") + body)


def recv_exactly(sock: socket.socket, n: int) -> bytes:
    chunks = bytearray()
    while len(chunks) < n:
        part = sock.recv(n - len(chunks))
        if not part:
            raise TransportError("connection closed mid-frame")
        chunks.extend(part)
    return bytes(chunks)


def recv_frame(sock: socket.socket) -> Any:
    header = recv_exactly(sock, 4)
    length = int.from_bytes(header, "big")
    if length > MAX_FRAME:
        raise TransportError(f"frame of {length} bytes exceeds limit")
    return json.loads(recv_exactly(sock, length).decode("utf-8"))


def split_address(address: str) -> tuple[str, int]:
    host, _, port = address.rpartition(":")
    if not host or not port.isdigit():
        raise TransportError(f"address {address!r} is not host:port")
    return host, int(port)


def roundtrip(address: str, obj: Any, timeout: float = 5.0) -> Any:
    """One request-response exchange with a fresh connection."""
    host, port = split_address(address)
    with socket.create_connection((host, port), timeout=timeout) as sock:
        send_frame(sock, obj)
        return recv_frame(sock)

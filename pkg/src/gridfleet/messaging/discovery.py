"""Agent discovery: an alias nameserver plus the persistent naming
directory (NDS) that stores where the nameserver itself currently lives.

The nameserver is in-memory and dies with its process; the NDS is a tiny
file-backed phonebook that survives restarts. Agents find the nameserver
through the NDS by a fixed nickname, so the nameserver may come back on a
different port without anyone editing configuration: the lookup flow is
NDS -> nameserver -> peer endpoint, with a refresh + re-register retry
when the cached nameserver address goes stale.
"""

from __future__ import annotations

import json
import os
import re
import socketserver
import threading
from pathlib import Path

import httpx

from ..gridworld.scenario import ALIAS_PATTERN
from .bus import AliasTaken, NotFound, Unresolvable
from .transport import TransportError, recv_frame, roundtrip, send_frame

NAMESERVER_NICKNAME = "ns-main"
_ALIAS_RE = re.compile(ALIAS_PATTERN)


def _check_alias(alias: str) -> str:
    if not _ALIAS_RE.match(alias):
        raise ValueError(f"invalid alias {alias!r}")
    return alias


class Nameserver:
    """Alias -> endpoint table with atomic per-key updates."""

    def __init__(self) -> None:
        self._entries: dict[str, str] = {}
        self._lock = threading.Lock()

    def register(self, alias: str, endpoint: str) -> None:
        _check_alias(alias)
        with self._lock:
            current = self._entries.get(alias)
            if current is not None and current != endpoint:
                raise AliasTaken(f"alias {alias!r} is registered to {current}")
            self._entries[alias] = endpoint

    def resolve(self, alias: str) -> str:
        with self._lock:
            try:
                return self._entries[alias]
            except KeyError:
                raise NotFound(f"alias {alias!r} is not registered") from None

    def entries(self) -> dict[str, str]:
        with self._lock:
            return dict(self._entries)


class NdsStore:
    """Nickname -> address pairs, last write wins, persisted on every put."""

    def __init__(self, path: str | Path | None = None):
        self._path = Path(path) if path is not None else None
        self._entries: dict[str, str] = {}
        self._lock = threading.Lock()
        if self._path is not None and self._path.exists():
            self._entries = json.loads(self._path.read_text(encoding="utf-8"))

    def put(self, nickname: str, address: str) -> None:
        _check_alias(nickname)
        with self._lock:
            self._entries[nickname] = address
            self._persist()

    def lookup(self, nickname: str) -> str:
        with self._lock:
            try:
                return self._entries[nickname]
            except KeyError:
                raise NotFound(f"nickname {nickname!r} has no address on file") from None

    def entries(self) -> dict[str, str]:
        with self._lock:
            return dict(self._entries)

    def _persist(self) -> None:
        if self._path is None:
            return
        self._path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self._path.with_suffix(".tmp")
        tmp.write_text(json.dumps(self._entries, sort_keys=True, indent=2), encoding="utf-8")
        os.replace(tmp, self._path)


# -- nameserver over TCP -------------------------------------------------------


class _NameserverRequestHandler(socketserver.BaseRequestHandler):
    def handle(self) -> None:  # one frame per connection
        server: NameserverServer = self.server  # type: ignore[assignment]
        try:
            msg = recv_frame(self.request)
        except (TransportError, json.JSONDecodeError):
            return
        send_frame(self.request, server.answer(msg))


class NameserverServer(socketserver.ThreadingTCPServer):
    """The in-memory nameserver behind a one-frame-per-connection wire."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        super().__init__((host, port), _NameserverRequestHandler)
        self.table = Nameserver()
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> str:
        host, port = self.server_address[:2]
        return f"{host}:{port}"

    def start(self) -> "NameserverServer":
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self.shutdown()
        self.server_close()

    def answer(self, msg: dict) -> dict:
        op = msg.get("op")
        try:
            if op == "register":
                self.table.register(msg["alias"], msg["endpoint"])
                return {"ok": True}
            if op == "resolve":
                return {"ok": True, "endpoint": self.table.resolve(msg["alias"])}
            if op == "entries":
                return {"ok": True, "entries": self.table.entries()}
        except AliasTaken as exc:
            return {"ok": False, "error": "AliasTaken", "detail": str(exc)}
        except NotFound as exc:
            return {"ok": False, "error": "NotFound", "detail": str(exc)}
        except (KeyError, ValueError) as exc:
            return {"ok": False, "error": "BadRequest", "detail": str(exc)}
        return {"ok": False, "error": "BadRequest", "detail": f"unknown op {op!r}"}


class NameserverClient:
    def __init__(self, address: str, timeout: float = 5.0):
        self.address = address
        self.timeout = timeout

    def _call(self, msg: dict) -> dict:
        try:
            answer = roundtrip(self.address, msg, timeout=self.timeout)
        except (OSError, TransportError) as exc:
            raise Unresolvable(f"nameserver at {self.address} unreachable: {exc}") from exc
        if answer.get("ok"):
            return answer
        error = answer.get("error")
        detail = answer.get("detail", "")
        if error == "AliasTaken":
            raise AliasTaken(detail)
        if error == "NotFound":
            raise NotFound(detail)
        raise Unresolvable(detail or "nameserver rejected the request")

    def register(self, alias: str, endpoint: str) -> None:
        self._call({"op": "register", "alias": alias, "endpoint": endpoint})

    def resolve(self, alias: str) -> str:
        return self._call({"op": "resolve", "alias": alias})["endpoint"]

    def entries(self) -> dict[str, str]:
        return self._call({"op": "entries"})["entries"]


# -- NDS over HTTP --------------------------------------------------------------


class NdsClient:
    def __init__(self, base_url: str, timeout: float = 5.0):
        self.base_url = base_url.rstrip("/")
        self._client = httpx.Client(timeout=timeout)

    def put(self, nickname: str, address: str) -> None:
        url = f"{self.base_url}/nds/entries/{nickname}"
        response = self._client.put(url, json={"address": address})
        response.raise_for_status()

    def lookup(self, nickname: str) -> str:
        url = f"{self.base_url}/nds/entries/{nickname}"
        response = self._client.get(url)
        if response.status_code == 404:
            raise NotFound(f"nickname {nickname!r} has no address on file")
        response.raise_for_status()
        return response.json()["address"]

    def close(self) -> None:
        self._client.close()


class DiscoveryClient:
    """Resolution with the NDS fallback: when the cached nameserver address
    goes stale, fetch its current address by nickname, re-register our own
    endpoint there, and retry."""

    def __init__(
        self,
        nds: NdsClient,
        alias: str,
        endpoint: str,
        nameserver_nickname: str = NAMESERVER_NICKNAME,
    ):
        self.nds = nds
        self.alias = alias
        self.endpoint = endpoint
        self.nickname = nameserver_nickname
        self._ns_address: str | None = None

    def _nameserver(self, refresh: bool = False) -> NameserverClient:
        if refresh or self._ns_address is None:
            self._ns_address = self.nds.lookup(self.nickname)
        return NameserverClient(self._ns_address)

    def register_self(self) -> None:
        try:
            self._nameserver().register(self.alias, self.endpoint)
        except Unresolvable:
            self._nameserver(refresh=True).register(self.alias, self.endpoint)

    def resolve(self, alias: str) -> str:
        try:
            return self._nameserver().resolve(alias)
        except (Unresolvable, NotFound):
            # nameserver moved or was restarted empty: find it again via the
            # NDS, make sure we exist in the fresh table, then retry once
            ns = self._nameserver(refresh=True)
            ns.register(self.alias, self.endpoint)
            return ns.resolve(alias)

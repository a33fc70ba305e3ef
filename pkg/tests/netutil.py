"""Helpers for tests that need real sockets: an NDS served by uvicorn on
an ephemeral port, and scenario fixtures sized for wall-clock runs."""

from __future__ import annotations

import threading
import time

import uvicorn
from fastapi import FastAPI

from gridfleet.messaging.discovery import NdsStore
from gridfleet.messaging.nds_api import nds_router


class NdsService:
    def __init__(self, path=None):
        self.store = NdsStore(path)
        app = FastAPI()
        app.include_router(nds_router(self.store))
        self._config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
        self._server = uvicorn.Server(self._config)
        self._thread = threading.Thread(target=self._server.run, daemon=True)

    def start(self) -> "NdsService":
        self._thread.start()
        deadline = time.time() + 10
        while not self._server.started:
            if time.time() > deadline:
                raise RuntimeError("NDS server did not come up")
            time.sleep(0.01)
        return self

    @property
    def base_url(self) -> str:
        sock = self._server.servers[0].sockets[0]
        host, port = sock.getsockname()[:2]
        return f"http://{host}:{port}"

    def stop(self) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=5)


def single_carrier_scenario(first_stop_distance: int = 3) -> dict:
    """One carrier, one truck, two customers on the open 5x5 grid."""
    first = {3: 3, 2: 2}.get(first_stop_distance, 3)
    return {
        "grid": {"width": 5, "height": 5},
        "depots": [
            {"label": "D1", "marker": 0, "trucks": [{"alias": "T1", "capacity": 5}]},
        ],
        "customers": [
            {"label": "C1", "marker": first, "demand": 1, "carrier": "D1"},
            {"label": "C2", "marker": 7, "demand": 2, "carrier": "D1"},
        ],
        "timing": {"edge_ticks": 1, "service_ticks": 2},
    }


def wait_until(predicate, timeout: float = 20.0, interval: float = 0.02) -> bool:
    deadline = time.time() + timeout
    while time.time() < deadline:
        if predicate():
            return True
        time.sleep(interval)
    return False

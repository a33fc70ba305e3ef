"""Digital-twin gateway: run engine, event-sourced store and HTTP/WS API."""

from .engine import EngineSettings, RunEngine, execute_run
from .records import (
    COMPLETED,
    CONFIGURED,
    FAILED,
    RUNNING,
    EventFrame,
    apply_frame,
    fold_frames,
    initial_snapshot,
    plan_view,
)
from .store import AlreadyRunning, RunStore, StoreError, UnknownRun, read_frame_log

__all__ = [
    "AlreadyRunning",
    "COMPLETED",
    "CONFIGURED",
    "EngineSettings",
    "EventFrame",
    "FAILED",
    "RUNNING",
    "RunEngine",
    "RunStore",
    "StoreError",
    "UnknownRun",
    "apply_frame",
    "execute_run",
    "fold_frames",
    "initial_snapshot",
    "plan_view",
    "read_frame_log",
]

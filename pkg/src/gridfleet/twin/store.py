"""Run storage: append-only frame and message logs with live fold state,
optional newline-delimited persistence, and change notification for
stream readers.

One writer (the run loop) appends; any number of readers page through
``frames_since`` / ``messages_since`` and block on ``wait_for_frames``.
Readers never block the writer: appends take the lock only long enough to
extend the lists.
"""

from __future__ import annotations

import copy
import json
import threading
import uuid
from pathlib import Path

from ..gridworld.scenario import Scenario
from ..messaging.envelope import Envelope
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
    status_may_advance,
)


class StoreError(Exception):
    pass


class UnknownRun(StoreError):
    pass


class AlreadyRunning(StoreError):
    pass


class RunState:
    def __init__(self, run_id: str, scenario: Scenario, directory: Path | None):
        self.run_id = run_id
        self.scenario = scenario
        self.digest = scenario.digest()
        self.status = CONFIGURED
        self.started_tick: int | None = None
        self.ended_tick: int | None = None
        self.seed: int | None = None
        self.plan_pre: dict | None = None
        self.plan_post: dict | None = None
        self.reduction: dict | None = None
        self.error: str | None = None
        self.frames: list[EventFrame] = []
        self.messages: list[Envelope] = []
        self.live: dict = initial_snapshot(scenario)
        self.directory = directory
        self._events_file = None
        self._messages_file = None
        if directory is not None:
            directory.mkdir(parents=True, exist_ok=True)
            self._events_file = (directory / "events.ndjson").open("w", encoding="utf-8")
            self._messages_file = (directory / "messages.ndjson").open("w", encoding="utf-8")

    def close_files(self) -> None:
        for handle in (self._events_file, self._messages_file):
            if handle is not None:
                handle.close()
        self._events_file = None
        self._messages_file = None

    def summary(self) -> dict:
        return {
            "run_id": self.run_id,
            "scenario_digest": self.digest,
            "status": self.status,
            "seed": self.seed,
            "started_tick": self.started_tick,
            "ended_tick": self.ended_tick,
            "plan_pre": self.plan_pre,
            "plan_post": self.plan_post,
            "reduction": self.reduction,
            "error": self.error,
            "frame_count": len(self.frames),
            "message_count": len(self.messages),
        }


class RunStore:
    def __init__(self, runs_dir: str | Path | None = None):
        self.runs_dir = Path(runs_dir) if runs_dir is not None else None
        self._runs: dict[str, RunState] = {}
        self._lock = threading.Lock()
        self._changed = threading.Condition(self._lock)

    # -- lifecycle -------------------------------------------------------------

    def create_run(self, scenario: Scenario, run_id: str | None = None, seed: int | None = None) -> str:
        with self._lock:
            for state in self._runs.values():
                if state.status in (CONFIGURED, RUNNING):
                    raise AlreadyRunning(f"run {state.run_id} is still {state.status}")
            if run_id is None:
                run_id = f"run-{uuid.uuid4().hex[:12]}"
            if run_id in self._runs:
                raise StoreError(f"run id {run_id} already used")
            directory = self.runs_dir / run_id if self.runs_dir is not None else None
            state = RunState(run_id, scenario, directory)
            state.seed = seed
            self._runs[run_id] = state
            self._write_summary(state)
            return run_id

    def _state(self, run_id: str) -> RunState:
        try:
            return self._runs[run_id]
        except KeyError:
            raise UnknownRun(f"no run {run_id!r}") from None

    def run_ids(self) -> list[str]:
        with self._lock:
            return list(self._runs)

    def summary(self, run_id: str) -> dict:
        with self._lock:
            return self._state(run_id).summary()

    def scenario(self, run_id: str) -> Scenario:
        with self._lock:
            return self._state(run_id).scenario

    def set_status(self, run_id: str, status: str, error: str | None = None) -> None:
        with self._lock:
            state = self._state(run_id)
            if not status_may_advance(state.status, status):
                raise StoreError(f"status cannot move {state.status} -> {status}")
            state.status = status
            if error is not None:
                state.error = error
            if status in (COMPLETED, FAILED):
                self._write_summary(state)
                state.close_files()
            self._changed.notify_all()

    def set_plans(self, run_id: str, plan_pre, plan_post) -> None:
        with self._lock:
            state = self._state(run_id)
            state.plan_pre = plan_view(plan_pre)
            state.plan_post = plan_view(plan_post)
            self._write_summary(state)

    def set_reduction(self, run_id: str, reduction: dict) -> None:
        with self._lock:
            self._state(run_id).reduction = dict(reduction)

    def set_ticks(self, run_id: str, started: int | None = None, ended: int | None = None) -> None:
        with self._lock:
            state = self._state(run_id)
            if started is not None:
                state.started_tick = started
            if ended is not None:
                state.ended_tick = ended

    # -- appends -----------------------------------------------------------------

    def append_frame(self, run_id: str, tick: int, kind: str, payload: dict) -> EventFrame:
        with self._lock:
            state = self._state(run_id)
            frame = EventFrame(seq=len(state.frames) + 1, tick=tick, kind=kind, payload=payload)
            state.frames.append(frame)
            apply_frame(state.live, frame)
            if state._events_file is not None:
                state._events_file.write(frame.canonical() + "\n")
                state._events_file.flush()
            self._changed.notify_all()
            return frame

    def append_message(self, run_id: str, envelope: Envelope) -> None:
        with self._lock:
            state = self._state(run_id)
            state.messages.append(envelope)
            if state._messages_file is not None:
                state._messages_file.write(envelope.canonical() + "\n")
                state._messages_file.flush()

    # -- reads ---------------------------------------------------------------------

    def frames_since(self, run_id: str, since_seq: int = 0) -> list[EventFrame]:
        with self._lock:
            state = self._state(run_id)
            return state.frames[since_seq:]

    def last_seq(self, run_id: str) -> int:
        with self._lock:
            return len(self._state(run_id).frames)

    def messages_since(self, run_id: str, since_seq: int = 0) -> list[dict]:
        """Message log entries paired with the seq of their message_sent frame."""
        with self._lock:
            state = self._state(run_id)
            out = []
            for frame in state.frames[since_seq:]:
                if frame.kind == "message_sent":
                    out.append({"seq": frame.seq, "envelope": frame.payload["envelope"]})
            return out

    def message_log(self, run_id: str) -> list[Envelope]:
        with self._lock:
            return list(self._state(run_id).messages)

    def live_snapshot(self, run_id: str) -> dict:
        """The incrementally maintained current state."""
        with self._lock:
            return copy.deepcopy(self._state(run_id).live)

    def snapshot(self, run_id: str, at_seq: int | None = None) -> dict:
        """State at a given seq, reconstructed by folding the frame log."""
        with self._lock:
            state = self._state(run_id)
            if at_seq is None:
                frames = list(state.frames)
            else:
                frames = state.frames[:at_seq]
        return fold_frames(self.scenario(run_id), frames)

    def wait_for_frames(self, run_id: str, after_seq: int, timeout: float = 0.5) -> list[EventFrame]:
        """Block until frames beyond after_seq exist (or timeout); may be empty."""
        with self._changed:
            state = self._state(run_id)
            if len(state.frames) <= after_seq:
                self._changed.wait(timeout)
            return state.frames[after_seq:]

    def is_finished(self, run_id: str) -> bool:
        with self._lock:
            return self._state(run_id).status in (COMPLETED, FAILED)

    # -- persistence ------------------------------------------------------------------

    def _write_summary(self, state: RunState) -> None:
        if state.directory is None:
            return
        data = dict(state.summary())
        data["scenario"] = state.scenario.model_dump(mode="json")
        path = state.directory / "run.json"
        path.write_text(json.dumps(data, sort_keys=True, indent=2), encoding="utf-8")


def read_frame_log(path: str | Path) -> list[EventFrame]:
    """Parse an events.ndjson file; reports the first corrupt line."""
    frames: list[EventFrame] = []
    path = Path(path)
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                frames.append(EventFrame.from_json(line))
            except Exception as exc:
                raise StoreError(f"{path}:{lineno}: corrupt frame: {exc}") from exc
    return frames

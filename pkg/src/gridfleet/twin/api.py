"""The gateway service: request-driven control API plus the event-driven
frame stream.

Control is plain HTTP (start runs, read state, page messages, configure
the naming directory); live updates go over one WebSocket per run, each
frame a JSON text message with a strictly increasing ``seq``. A client
that reconnects with ``?since=<last seq>`` resumes without gaps or
duplicates because frames are replayed straight from the run's log.
"""

from __future__ import annotations

import threading
from pathlib import Path

from anyio import to_thread
from fastapi import FastAPI, HTTPException, Query, Response, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict

from ..gridworld.scenario import Scenario, ScenarioError, parse_scenario
from ..messaging.discovery import NAMESERVER_NICKNAME, NdsStore
from ..messaging.nds_api import nds_router
from ..showcase import showcase_dict
from .engine import EngineSettings, RunEngine
from .store import AlreadyRunning, RunStore, UnknownRun


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: dict | None = None
    builtin: str | None = None
    seed: int = 0
    tick_delay_s: float = 0.0


class RunCreated(BaseModel):
    run_id: str


class RunList(BaseModel):
    runs: list[dict]


class MessagePage(BaseModel):
    messages: list[dict]


class NdsConfigBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    address: str
    nickname: str = NAMESERVER_NICKNAME


BUILTIN_SCENARIOS: dict[str, dict] = {"showcase": showcase_dict()}


def build_app(
    store: RunStore | None = None,
    nds_store: NdsStore | None = None,
    settings: EngineSettings | None = None,
    frontend_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="gridfleet gateway", version="0.1.0")
    app.state.store = store if store is not None else RunStore()
    app.state.nds = nds_store if nds_store is not None else NdsStore()
    app.state.settings = settings if settings is not None else EngineSettings()
    app.state.engines = {}
    app.include_router(nds_router(app.state.nds))

    def _store() -> RunStore:
        return app.state.store

    def _summary_or_404(run_id: str) -> dict:
        try:
            return _store().summary(run_id)
        except UnknownRun:
            raise HTTPException(status_code=404, detail=f"no run {run_id!r}")

    # -- control ---------------------------------------------------------------

    @app.post("/api/runs", status_code=201, response_model=RunCreated)
    def start_run(request: RunRequest) -> RunCreated:
        if (request.scenario is None) == (request.builtin is None):
            raise HTTPException(
                status_code=422, detail="provide exactly one of 'scenario' or 'builtin'"
            )
        data = request.scenario
        if request.builtin is not None:
            data = BUILTIN_SCENARIOS.get(request.builtin)
            if data is None:
                raise HTTPException(
                    status_code=422, detail=f"unknown builtin scenario {request.builtin!r}"
                )
        try:
            scenario: Scenario = parse_scenario(data)
        except ScenarioError as exc:
            raise HTTPException(status_code=422, detail=f"invalid scenario: {exc}")
        run_settings = EngineSettings(
            seed=request.seed,
            max_ticks=app.state.settings.max_ticks,
            confirm_timeout_ticks=app.state.settings.confirm_timeout_ticks,
            confirm_retry_limit=app.state.settings.confirm_retry_limit,
            prefer_exact=app.state.settings.prefer_exact,
            tick_delay_s=request.tick_delay_s or app.state.settings.tick_delay_s,
        )
        try:
            run_id = _store().create_run(scenario, seed=request.seed)
        except AlreadyRunning as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        engine = RunEngine(scenario, _store(), run_id, run_settings)
        app.state.engines[run_id] = engine
        threading.Thread(target=engine.run, name=f"run-{run_id}", daemon=True).start()
        return RunCreated(run_id=run_id)

    @app.get("/api/runs", response_model=RunList)
    def list_runs() -> RunList:
        return RunList(runs=[_store().summary(rid) for rid in _store().run_ids()])

    @app.get("/api/runs/{run_id}")
    def run_summary(run_id: str) -> dict:
        return _summary_or_404(run_id)

    @app.get("/api/runs/{run_id}/state")
    def run_state(run_id: str, at_seq: int | None = Query(default=None, ge=0)) -> dict:
        _summary_or_404(run_id)
        return _store().snapshot(run_id, at_seq=at_seq)

    @app.get("/api/runs/{run_id}/messages", response_model=MessagePage)
    def run_messages(run_id: str, since: int = Query(default=0, ge=0)) -> MessagePage:
        _summary_or_404(run_id)
        return MessagePage(messages=_store().messages_since(run_id, since))

    @app.post("/api/runs/{run_id}/abort", status_code=202)
    def abort_run(run_id: str) -> dict:
        summary = _summary_or_404(run_id)
        if summary["status"] in ("completed", "failed"):
            raise HTTPException(status_code=409, detail=f"run is already {summary['status']}")
        engine = app.state.engines.get(run_id)
        if engine is None:
            raise HTTPException(status_code=409, detail="run is not controlled by this gateway")
        engine.flag_failure("aborted by operator")
        return {"run_id": run_id, "status": "aborting"}

    # -- configuration -----------------------------------------------------------

    @app.post("/api/nds-config", status_code=204)
    def set_nds_config(body: NdsConfigBody) -> Response:
        app.state.nds.put(body.nickname, body.address)
        return Response(status_code=204)

    @app.get("/api/nds-config")
    def get_nds_config() -> dict:
        return {"entries": app.state.nds.entries()}

    @app.get("/api/scenarios")
    def list_scenarios() -> dict:
        return {"scenarios": sorted(BUILTIN_SCENARIOS)}

    @app.get("/api/scenarios/{name}")
    def get_scenario(name: str) -> dict:
        if name not in BUILTIN_SCENARIOS:
            raise HTTPException(status_code=404, detail=f"unknown scenario {name!r}")
        return BUILTIN_SCENARIOS[name]

    # -- event stream ----------------------------------------------------------------

    @app.websocket("/ws/runs/{run_id}")
    async def stream_frames(websocket: WebSocket, run_id: str, since: int = Query(default=0, ge=0)):
        await websocket.accept()
        store = _store()
        try:
            store.summary(run_id)
        except UnknownRun:
            await websocket.close(code=4404, reason=f"no run {run_id!r}")
            return
        last = since
        try:
            while True:
                frames = await to_thread.run_sync(store.wait_for_frames, run_id, last, 0.2)
                for frame in frames:
                    await websocket.send_text(frame.canonical())
                    last = frame.seq
                if store.is_finished(run_id) and last >= store.last_seq(run_id):
                    break
        except WebSocketDisconnect:
            return
        await websocket.close()

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="dashboard")

    return app

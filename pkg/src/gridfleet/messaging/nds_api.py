"""HTTP face of the naming directory: a two-endpoint REST resource.

PUT /nds/entries/{nickname}  body {"address": "host:port"} -> 204
GET /nds/entries/{nickname}  -> 200 {"address": ...} or 404
"""

from __future__ import annotations

from fastapi import APIRouter, HTTPException, Response
from pydantic import BaseModel, ConfigDict

from .bus import NotFound
from .discovery import NdsStore


class NdsEntryBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    address: str


class NdsEntryView(BaseModel):
    nickname: str
    address: str


def nds_router(store: NdsStore) -> APIRouter:
    router = APIRouter()

    @router.put("/nds/entries/{nickname}", status_code=204)
    def put_entry(nickname: str, body: NdsEntryBody) -> Response:
        try:
            store.put(nickname, body.address)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return Response(status_code=204)

    @router.get("/nds/entries/{nickname}", response_model=NdsEntryView)
    def get_entry(nickname: str) -> NdsEntryView:
        try:
            return NdsEntryView(nickname=nickname, address=store.lookup(nickname))
        except NotFound:
            raise HTTPException(status_code=404, detail=f"no entry for {nickname!r}")

    return router

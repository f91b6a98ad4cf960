"""Session service: exposes the orchestrator over HTTP for the UI and for
batch harnesses. Sessions live in memory, one writer at a time, with
optional file-backed snapshots for replay."""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .csp import InvalidQuery, query_from_dict
from .orchestrator import (
    OrchestratorConfig,
    PatchError,
    SessionState,
    TurnResult,
    new_session,
    patch_from_dict,
    run_turn,
    session_record,
)
from .sandbox import Sandbox


class ConfigBody(BaseModel):
    k: int = 3
    l: int = 10
    tool_budget: int = 120


class CreateSessionBody(BaseModel):
    query: dict
    config: ConfigBody = Field(default_factory=ConfigBody)


class TurnBody(BaseModel):
    query: Optional[dict] = None
    patches: Optional[list[dict]] = None


@dataclass
class _Session:
    handle_id: str
    created_at: str
    state: SessionState
    config: OrchestratorConfig
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_query: Optional[object] = None


def _turn_payload(result: TurnResult) -> dict:
    return {
        "turn": result.turn,
        "verdict": result.verdict,
        "best_effort": result.best_effort,
        "plan": result.plan,
        "violations": result.violations,
        "l_used": result.l_used,
        "k_total": result.k_total,
        "tool_calls": result.tool_calls,
        "cities": result.cities,
        "trace": result.trace,
    }


def create_app(sandbox: Sandbox, state_dir: str | Path | None = None,
               ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="triplan session service")
    sessions: dict[str, _Session] = {}
    persist_dir = Path(state_dir) if state_dir else None
    if persist_dir:
        persist_dir.mkdir(parents=True, exist_ok=True)
    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    def get_session(session_id: str) -> _Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    def persist(session: _Session) -> None:
        if persist_dir is None:
            return
        record = session_record(session.state)
        record["id"] = session.handle_id
        (persist_dir / f"{session.handle_id}.json").write_text(
            json.dumps(record, indent=2))

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict:
        try:
            query = query_from_dict(body.query)
            config = OrchestratorConfig(k=body.config.k, l=body.config.l,
                                        tool_budget=body.config.tool_budget)
        except (InvalidQuery, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        handle_id = uuid.uuid4().hex
        session = _Session(
            handle_id=handle_id,
            created_at=datetime.now(timezone.utc).isoformat(),
            state=new_session(sandbox, config),
            config=config,
        )
        session.last_query = query
        sessions[handle_id] = session
        return {"id": handle_id, "created_at": session.created_at,
                "config": {"k": config.k, "l": config.l,
                           "tool_budget": config.tool_budget}}

    @app.post("/sessions/{session_id}/turns")
    def post_turn(session_id: str, body: TurnBody) -> dict:
        session = get_session(session_id)
        if body.query is None and body.patches is None:
            raise HTTPException(status_code=422, detail="need query or patches")
        if not session.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="turn already in progress")
        try:
            if body.query is not None:
                try:
                    query = query_from_dict(body.query)
                except InvalidQuery as exc:
                    raise HTTPException(status_code=422, detail=str(exc))
            else:
                from .orchestrator import apply_patches

                if session.last_query is None:
                    raise HTTPException(status_code=422,
                                        detail="first turn must be a full query")
                try:
                    patches = [patch_from_dict(p) for p in body.patches or []]
                    query = apply_patches(session.last_query, patches)
                except PatchError as exc:
                    raise HTTPException(status_code=422, detail=str(exc))
            result = run_turn(session.state, query, session.config)
            session.last_query = query
            persist(session)
            return _turn_payload(result)
        finally:
            session.lock.release()

    @app.get("/sessions/{session_id}/plan")
    def get_plan(session_id: str) -> list:
        session = get_session(session_id)
        if not session.state.trajectory:
            raise HTTPException(status_code=404, detail="no turns yet")
        return session.state.trajectory[-1].plan

    @app.get("/sessions/{session_id}/trace")
    def get_trace(session_id: str) -> dict:
        session = get_session(session_id)
        return {"lines": list(session.state.trace)}

    @app.get("/sessions/{session_id}/constraints")
    def get_constraints(session_id: str) -> dict:
        from .constraints import build_constraints
        from .domains import extract_domains

        session = get_session(session_id)
        if session.state.queries:
            query = session.state.queries[-1]
        elif session.last_query is not None:
            query = session.last_query
        else:
            raise HTTPException(status_code=404, detail="no query yet")
        domains = session.state.domains_cache
        if domains is None:
            domains = extract_domains(session.state.notebook)
        return {"lines": build_constraints(query, domains).dump_lines()}

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str) -> None:
        get_session(session_id)
        del sessions[session_id]

    return app

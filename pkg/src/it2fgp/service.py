"""HTTP service exposing sessions to the decision-maker console.

A thin adapter over the dialogue module: in-memory session store,
per-session locks, every response field derived from session state.
Errors are {code, message} JSON with 400 (bad request), 404 (unknown
session), 409 (decision on a finished session).
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .dialogue import (
    AWAITING,
    Decision,
    SessionConfig,
    SessionState,
    decide,
    open_session,
    session_report,
)
from .errors import (
    FileFormatError,
    InvalidStateError,
    It2FgpError,
    NoProgressError,
    StructuralError,
)
from .fixtures import FIXTURE_NAMES, fixture_index, load_fixture
from .hostio import round12
from .nlpcore import NlpConfig
from .sigmodel import program_from_json


@dataclass
class SessionHandle:
    id: str
    created_at: str
    state: SessionState
    lock: threading.Lock = field(default_factory=threading.Lock)


class _ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


class CreateSessionBody(BaseModel):
    fixture: Optional[str] = None
    program: Optional[dict] = None
    config: Optional[dict] = None


class DecisionBody(BaseModel):
    verdict: str
    targets: Optional[list[int]] = None


def _proposal_view(state: SessionState, prop) -> dict:
    return round12(prop.to_json())


def _session_view(handle: SessionHandle) -> dict:
    s = handle.state
    view = {
        "id": handle.id,
        "created_at": handle.created_at,
        "status": s.status,
        "variables": list(s.crisp_program.variables),
        "objectives": [
            {"index": k, "name": o.name or f"objective {k}", "sense": o.sense}
            for k, o in enumerate(s.crisp_program.objectives)
        ],
        "iterations": [
            {
                "goals": [g.to_json() for g in it.goals],
                "proposal": it.proposal.to_json(),
                "decision": it.decision.to_json() if it.decision else None,
            }
            for it in s.iterations
        ],
    }
    if s.payoff is not None:
        view["payoff"] = s.payoff.to_json()
    if s.box is not None:
        view["box"] = s.box.to_json()
    if s.original_goals:
        view["original_goals"] = [g.to_json() for g in s.original_goals]
    if s.status == "failed":
        view["failure"] = {"stage": s.failure_stage, "message": s.failure_message}
    if s.iterations:
        view["proposal"] = s.incumbent.to_json()
    return round12(view)


def create_app(default_nlp: NlpConfig = NlpConfig(),
               trace_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="it2fgp", version="0.1.0")
    store: dict[str, SessionHandle] = {}
    store_lock = threading.Lock()

    def persist(handle: SessionHandle):
        if not trace_dir:
            return
        os.makedirs(trace_dir, exist_ok=True)
        path = os.path.join(trace_dir, f"{handle.id}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(round12(session_report(handle.state)), fh, indent=1)

    def get_handle(session_id: str) -> SessionHandle:
        with store_lock:
            handle = store.get(session_id)
        if handle is None:
            raise _ApiError(404, "unknown-session",
                            f"no session with id {session_id}")
        return handle

    @app.exception_handler(_ApiError)
    async def api_error_handler(_req: Request, exc: _ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    @app.get("/fixtures")
    def fixtures():
        return {"fixtures": fixture_index()}

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        if (body.fixture is None) == (body.program is None):
            raise _ApiError(400, "bad-request",
                            "provide exactly one of 'fixture' or 'program'")
        try:
            if body.fixture is not None:
                if body.fixture not in FIXTURE_NAMES:
                    raise _ApiError(400, "unknown-fixture",
                                    f"no fixture named {body.fixture!r}")
                program = load_fixture(body.fixture)
            else:
                program = program_from_json(body.program)
        except (FileFormatError, StructuralError) as exc:
            raise _ApiError(400, "bad-program", str(exc)) from exc

        cfg_in = body.config or {}
        try:
            nlp = NlpConfig(
                seed=int(cfg_in.get("seed", default_nlp.seed)),
                restarts=int(cfg_in.get("restarts", default_nlp.restarts)),
                min_sense_floor=bool(cfg_in.get("min_sense_floor",
                                                default_nlp.min_sense_floor)),
            )
            config = SessionConfig(
                nlp=nlp,
                relinearize_at_incumbent=bool(
                    cfg_in.get("relinearize_at_incumbent", True)),
                strict_validation=bool(cfg_in.get("strict_validation", False)),
            )
        except (TypeError, ValueError) as exc:
            raise _ApiError(400, "bad-config", str(exc)) from exc

        state = open_session(program, config)
        if state.status == "failed":
            raise _ApiError(400, f"failed-{state.failure_stage}",
                            state.failure_message or "pipeline failed")
        handle = SessionHandle(id=uuid.uuid4().hex,
                               created_at=datetime.now(timezone.utc).isoformat(),
                               state=state)
        with store_lock:
            store[handle.id] = handle
        persist(handle)
        return {"id": handle.id, "status": state.status,
                "proposal": _proposal_view(state, state.incumbent)}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_view(get_handle(session_id))

    @app.post("/sessions/{session_id}/decision")
    def post_decision(session_id: str, body: DecisionBody):
        handle = get_handle(session_id)
        with handle.lock:
            state = handle.state
            if state.status != AWAITING:
                raise _ApiError(409, "session-finished",
                                f"session is {state.status}; no further "
                                "decisions accepted")
            try:
                decision = Decision(body.verdict, tuple(body.targets or ()))
                decide(state, decision)
            except (StructuralError, NoProgressError) as exc:
                raise _ApiError(400, "bad-decision", str(exc)) from exc
            except InvalidStateError as exc:
                raise _ApiError(409, "session-finished", str(exc)) from exc
            except It2FgpError as exc:
                raise _ApiError(400, "decision-failed", str(exc)) from exc
            persist(handle)
            return {"id": handle.id, "status": state.status,
                    "proposal": _proposal_view(state, state.incumbent)}

    @app.get("/sessions/{session_id}/trace")
    def get_trace(session_id: str):
        handle = get_handle(session_id)
        out = round12(session_report(handle.state))
        out["id"] = handle.id
        return out

    return app

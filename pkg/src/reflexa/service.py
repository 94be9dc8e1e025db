"""REST facade over the engine, with file-backed session persistence.

Every mutating request applies exactly one engine operation and persists
the session document before responding. Requests for different sessions run
in parallel; requests for the same session serialize on a per-session lock.
Errors come back as ``{"error_code", "message"}`` with 4xx for client
faults and 502 when the model provider (or its output) is at fault.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .dispatch import ReflectionMode
from .engine import Engine
from .errors import (
    GatewayError,
    ReflexaError,
    UnknownNodeError,
    UnknownSessionError,
    UnknownSparkError,
)
from .persistence import _node_to_doc, _turn_to_doc, load_session, save_session, session_to_doc
from .session import SessionSettings, SessionState


class SessionStore:
    """In-memory session registry backed by one JSON file per session."""

    def __init__(self, engine: Engine, sessions_dir: str | Path):
        self.engine = engine
        self.sessions_dir = Path(sessions_dir)
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        for path in sorted(self.sessions_dir.glob("*.json")):
            state = load_session(path)
            self._sessions[state.session_id] = state

    def create(self, settings: SessionSettings | None) -> SessionState:
        state = self.engine.create_session(settings)
        with self._registry_lock:
            self._sessions[state.session_id] = state
        self.persist(state)
        return state

    def get(self, session_id: str) -> SessionState:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSessionError(f"no session with id {session_id!r}") from None

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def persist(self, state: SessionState) -> None:
        save_session(state, self.sessions_dir / f"{state.session_id}.json")


# -- Request bodies --

class CreateSessionBody(BaseModel):
    settings: dict | None = None


class TurnBody(BaseModel):
    mode: str
    prompt: str


class CollectBody(BaseModel):
    code: str
    title: str
    preview_asset: str | None = None


class ModifyBody(BaseModel):
    instruction: str | None = None
    spark_id: str | None = None


class MergeBody(BaseModel):
    a: str
    b: str
    instruction: str


def _error_status(exc: ReflexaError) -> int:
    if isinstance(exc, (UnknownSessionError, UnknownNodeError, UnknownSparkError)):
        return 404
    if isinstance(exc, GatewayError):
        return 502
    return 400


def _settings_from_body(body: CreateSessionBody, engine: Engine) -> SessionSettings:
    settings = SessionSettings(mock=engine.gateway.is_mock)
    for key, value in (body.settings or {}).items():
        if not hasattr(settings, key):
            raise ReflexaError(f"unknown setting {key!r}")
        setattr(settings, key, value)
    return settings


def create_app(engine: Engine, sessions_dir: str | Path) -> FastAPI:
    app = FastAPI(title="reflexa", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(engine, sessions_dir)
    app.state.store = store

    @app.exception_handler(ReflexaError)
    async def _engine_error(request: Request, exc: ReflexaError):
        return JSONResponse(
            status_code=_error_status(exc),
            content={"error_code": exc.code, "message": exc.message},
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error_code": "invalid-request", "message": str(exc)},
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/sessions")
    def create_session_endpoint(body: CreateSessionBody | None = None):
        settings = _settings_from_body(body or CreateSessionBody(), engine)
        state = store.create(settings)
        return session_to_doc(state)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return session_to_doc(store.get(session_id))

    @app.get("/sessions/{session_id}/graph")
    def get_graph(session_id: str):
        state = store.get(session_id)
        nodes = []
        for node in state.graph.nodes.values():
            doc = _node_to_doc(node)
            doc.pop("turns")
            nodes.append(doc)
        return {"active_id": state.graph.active_id, "nodes": nodes}

    @app.post("/sessions/{session_id}/turns")
    def post_turn(session_id: str, body: TurnBody):
        state = store.get(session_id)
        try:
            mode = ReflectionMode.parse(body.mode)
        except ValueError as exc:
            raise ReflexaError(str(exc)) from exc
        with store.lock(session_id):
            result = engine.send_turn(state, mode, body.prompt)
            store.persist(state)
        response = {
            "decision": result.decision.value,
            "reply": _turn_to_doc(result.turn)["reply"],
        }
        if result.template_id is not None:
            response["template_id"] = result.template_id
        return response

    @app.post("/sessions/{session_id}/collect")
    def post_collect(session_id: str, body: CollectBody):
        state = store.get(session_id)
        with store.lock(session_id):
            node = engine.collect(state, body.code, body.title, body.preview_asset)
            store.persist(state)
        return {"node": _node_to_doc(node), "active_id": state.graph.active_id}

    @app.post("/sessions/{session_id}/nodes/{node_id}/activate")
    def post_activate(session_id: str, node_id: str):
        state = store.get(session_id)
        with store.lock(session_id):
            context = engine.activate(state, node_id)
            store.persist(state)
        return {
            "active_id": state.graph.active_id,
            "code": context.code,
            "history": [_turn_to_doc(t) for t in context.history],
        }

    @app.post("/sessions/{session_id}/nodes/{node_id}/duplicate")
    def post_duplicate(session_id: str, node_id: str):
        state = store.get(session_id)
        with store.lock(session_id):
            node = engine.duplicate(state, node_id)
            store.persist(state)
        return {"node": _node_to_doc(node), "active_id": state.graph.active_id}

    @app.delete("/sessions/{session_id}/nodes/{node_id}")
    def delete_node(session_id: str, node_id: str, recursive: bool = False):
        state = store.get(session_id)
        with store.lock(session_id):
            removed = engine.delete(state, node_id, recursive)
            store.persist(state)
        return {"removed": removed, "active_id": state.graph.active_id}

    @app.post("/sessions/{session_id}/nodes/{node_id}/modify")
    def post_modify(session_id: str, node_id: str, body: ModifyBody):
        state = store.get(session_id)
        if (body.instruction is None) == (body.spark_id is None):
            raise ReflexaError("provide exactly one of instruction or spark_id")
        with store.lock(session_id):
            if body.spark_id is not None:
                node, reply = engine.spark(state, node_id, body.spark_id)
            else:
                node, reply = engine.modify(state, node_id, body.instruction)
            store.persist(state)
        return {
            "node": _node_to_doc(node),
            "reply": {
                "fields": reply.fields,
                "raw": reply.raw,
                "repaired": reply.repaired,
                "call_kind": reply.call_kind,
            },
            "active_id": state.graph.active_id,
        }

    @app.post("/sessions/{session_id}/merge")
    def post_merge(session_id: str, body: MergeBody):
        state = store.get(session_id)
        with store.lock(session_id):
            node, reply = engine.merge(state, body.a, body.b, body.instruction)
            store.persist(state)
        return {
            "node": _node_to_doc(node),
            "reply": {
                "fields": reply.fields,
                "raw": reply.raw,
                "repaired": reply.repaired,
                "call_kind": reply.call_kind,
            },
            "active_id": state.graph.active_id,
        }

    @app.get("/sparks")
    def get_sparks():
        return {
            "sparks": [
                {
                    "id": s.id,
                    "label": s.label,
                    "reference": s.reference,
                    "preview_asset": s.preview_asset,
                }
                for s in engine.spark_options()
            ]
        }

    return app

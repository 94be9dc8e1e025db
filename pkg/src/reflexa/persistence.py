"""Session persistence: one JSON document per session, written atomically.

The document layout is fixed (schema_version 1) and serialization is
deterministic, so a saved session is diffable and byte-reproducible:
load(save(s)) round-trips every field, timestamps included.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .dispatch import DispatchState, ReflectionMode
from .errors import CorruptFileError, PersistenceError, SchemaVersionMismatchError
from .gateway import StructuredReply
from .graph import ChatTurn, NodeKind, VersionGraph, VersionNode
from .session import SessionSettings, SessionState

SCHEMA_VERSION = 1


def _turn_to_doc(turn: ChatTurn) -> dict:
    return {
        "seq": turn.seq,
        "mode": turn.mode.value,
        "template_id": turn.template_id,
        "user_prompt": turn.user_prompt,
        "reply": {
            "fields": dict(turn.reply.fields),
            "raw": turn.reply.raw,
            "repaired": turn.reply.repaired,
            "call_kind": turn.reply.call_kind,
        },
        "created_at": turn.created_at,
    }


def _node_to_doc(node: VersionNode) -> dict:
    return {
        "id": node.id,
        "parent_ids": list(node.parent_ids),
        "kind": node.kind.value,
        "code": node.code,
        "title": node.title,
        "description": node.description,
        "preview_asset": node.preview_asset,
        "created_at": node.created_at,
        "turns": [_turn_to_doc(t) for t in node.turns],
    }


def session_to_doc(state: SessionState) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "session_id": state.session_id,
        "created_at": state.created_at,
        "settings": {
            "chat_model": state.settings.chat_model,
            "embed_model": state.settings.embed_model,
            "context_window_turns": state.settings.context_window_turns,
            "fewshot_k": state.settings.fewshot_k,
            "mock": state.settings.mock,
        },
        "dispatch_state": {
            "last_mode": state.dispatch.last_mode.value if state.dispatch.last_mode else None,
            "run_length": state.dispatch.run_length,
            "in_template": state.dispatch.in_template,
        },
        "active_id": state.graph.active_id,
        "next_seq": state.graph.next_seq,
        "nodes": [_node_to_doc(n) for n in state.graph.nodes.values()],
    }


def dumps_session(state: SessionState) -> str:
    return json.dumps(session_to_doc(state), ensure_ascii=False, indent=2) + "\n"


def _turn_from_doc(doc: dict) -> ChatTurn:
    reply = doc["reply"]
    return ChatTurn(
        seq=doc["seq"],
        mode=ReflectionMode(doc["mode"]),
        template_id=doc["template_id"],
        user_prompt=doc["user_prompt"],
        reply=StructuredReply(
            fields=dict(reply["fields"]),
            raw=reply["raw"],
            repaired=reply["repaired"],
            call_kind=reply["call_kind"],
        ),
        created_at=doc["created_at"],
    )


def _node_from_doc(doc: dict) -> VersionNode:
    return VersionNode(
        id=doc["id"],
        parent_ids=list(doc["parent_ids"]),
        kind=NodeKind(doc["kind"]),
        code=doc["code"],
        title=doc["title"],
        description=doc["description"],
        preview_asset=doc["preview_asset"],
        created_at=doc["created_at"],
        turns=[_turn_from_doc(t) for t in doc["turns"]],
    )


def session_from_doc(doc: dict) -> SessionState:
    if not isinstance(doc, dict) or "schema_version" not in doc:
        raise CorruptFileError("not a session document")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise SchemaVersionMismatchError(
            f"schema version {doc['schema_version']!r} is not {SCHEMA_VERSION}"
        )
    try:
        settings_doc = doc["settings"]
        settings = SessionSettings(
            chat_model=settings_doc["chat_model"],
            embed_model=settings_doc["embed_model"],
            context_window_turns=settings_doc["context_window_turns"],
            fewshot_k=settings_doc["fewshot_k"],
            mock=settings_doc["mock"],
        )
        dispatch_doc = doc["dispatch_state"]
        dispatch = DispatchState(
            last_mode=(
                ReflectionMode(dispatch_doc["last_mode"])
                if dispatch_doc["last_mode"]
                else None
            ),
            run_length=dispatch_doc["run_length"],
            in_template=dispatch_doc["in_template"],
        )
        graph = VersionGraph.from_parts(
            nodes=[_node_from_doc(n) for n in doc["nodes"]],
            active_id=doc["active_id"],
            next_seq=doc["next_seq"],
        )
        return SessionState(
            session_id=doc["session_id"],
            created_at=doc["created_at"],
            settings=settings,
            graph=graph,
            dispatch=dispatch,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptFileError(f"malformed session document: {exc}") from exc


def save_session(state: SessionState, path: str | Path) -> Path:
    """Write the session atomically: temp file in place, then rename."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        data = dumps_session(state).encode("utf-8")
        with open(tmp, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except OSError as exc:
        raise PersistenceError(f"cannot write session file {path}: {exc}") from exc
    finally:
        tmp.unlink(missing_ok=True)
    return path


def load_session(path: str | Path) -> SessionState:
    path = Path(path)
    try:
        text = path.read_text("utf-8")
    except OSError as exc:
        raise PersistenceError(f"cannot read session file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptFileError(f"session file {path} is not valid JSON") from exc
    return session_from_doc(doc)

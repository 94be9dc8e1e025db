"""Headless session driving: scripted runs, deterministic replay, tree export.

A script is a JSON list of commands executed against a fresh session. In
mock mode the run is fully deterministic (logical clock, content-derived
session id), so the same script always produces a byte-identical session
file.

Replay takes a saved mock session and re-derives every recorded model
exchange from the persisted inputs: each turn's prompt bundle is rebuilt
from the graph exactly as the live run built it, completed against the mock
backend, and compared byte-for-byte with the recorded reply. The dispatch
decision sequence and the graph structure are audited too, and the state is
re-serialized to prove byte identity with the input file.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .clock import TickClock
from .dispatch import Decision, DispatchState, ReflectionMode, select_template
from .engine import Engine, mock_engine
from .errors import ReflexaError, ScriptParseError
from .graph import ChatTurn, ContextBundle, NodeKind, VersionNode
from .persistence import dumps_session, load_session, save_session
from .session import SessionSettings, SessionState

DIALOGUE_KINDS = {"general", "r1", "r2", "r3", "template"}

COMMAND_OPS = ("turn", "collect", "activate", "duplicate", "delete", "modify", "merge", "spark")


def load_script(path: str | Path) -> list[dict]:
    try:
        raw = Path(path).read_text("utf-8")
    except OSError as exc:
        raise ScriptParseError(f"cannot read script {path}: {exc}") from exc
    try:
        commands = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ScriptParseError(f"script is not valid JSON: {exc}") from exc
    if not isinstance(commands, list):
        raise ScriptParseError("script must be a JSON list of commands")
    for i, cmd in enumerate(commands):
        if not isinstance(cmd, dict) or "op" not in cmd:
            raise ScriptParseError(f"command {i} lacks an 'op' field")
        if cmd["op"] not in COMMAND_OPS:
            raise ScriptParseError(f"command {i} has unknown op {cmd['op']!r}")
    return commands


def apply_command(engine: Engine, session: SessionState, cmd: dict) -> None:
    op = cmd["op"]
    try:
        if op == "turn":
            engine.send_turn(session, ReflectionMode.parse(cmd["mode"]), cmd["prompt"])
        elif op == "collect":
            engine.collect(session, cmd.get("code", ""), cmd.get("title", ""))
        elif op == "activate":
            engine.activate(session, cmd["node"])
        elif op == "duplicate":
            engine.duplicate(session, cmd["node"])
        elif op == "delete":
            engine.delete(session, cmd["node"], cmd.get("recursive", False))
        elif op == "modify":
            engine.modify(session, cmd["node"], cmd.get("instruction", ""))
        elif op == "merge":
            engine.merge(session, cmd["a"], cmd["b"], cmd.get("instruction", ""))
        elif op == "spark":
            engine.spark(session, cmd["node"], cmd["spark"])
    except KeyError as exc:
        raise ScriptParseError(f"command {op!r} lacks field {exc}") from exc
    except ValueError as exc:
        raise ScriptParseError(str(exc)) from exc


def script_session_id(script_bytes: bytes) -> str:
    return "s" + hashlib.sha256(script_bytes).hexdigest()[:12]


def run_script(
    script_path: str | Path,
    out_path: str | Path | None = None,
    settings: SessionSettings | None = None,
    engine: Engine | None = None,
) -> tuple[SessionState, Path]:
    """Execute a script on a fresh session and write the session file.

    With the default (mock) engine the run is deterministic. An engine error
    mid-script still writes the partial session before propagating.
    """
    script_path = Path(script_path)
    commands = load_script(script_path)
    script_bytes = script_path.read_bytes()
    if engine is None:
        engine = mock_engine(
            clock=TickClock(), id_factory=lambda: script_session_id(script_bytes)
        )
    if settings is None:
        settings = SessionSettings(mock=engine.gateway.is_mock)
    session = engine.create_session(settings)
    out = Path(out_path) if out_path else script_path.with_suffix(".session.json")
    try:
        for cmd in commands:
            apply_command(engine, session, cmd)
    except ReflexaError:
        save_session(session, out)
        raise
    save_session(session, out)
    return session, out


def summarize_graph(session: SessionState) -> str:
    lines = [
        f"session {session.session_id}: {len(session.graph.nodes)} nodes, "
        f"active={session.graph.active_id}"
    ]
    for node in session.graph.nodes.values():
        parents = ",".join(node.parent_ids) or "-"
        marker = "*" if node.id == session.graph.active_id else " "
        lines.append(
            f"{marker} {node.id} [{node.kind.value}] parents={parents} "
            f"turns={len(node.turns)} {node.title!r}"
        )
    return "\n".join(lines)


# -- Deterministic replay --

@dataclass
class ReplayReport:
    turns_checked: int = 0
    turns_skipped: list[int] = field(default_factory=list)
    byte_identical: bool = False


class ReplayMismatch(ReflexaError):
    code = "replay-mismatch"


def _all_turns(session: SessionState) -> list[tuple[VersionNode, ChatTurn]]:
    pairs = [
        (node, turn) for node in session.graph.nodes.values() for turn in node.turns
    ]
    pairs.sort(key=lambda pair: pair[1].seq)
    return pairs


def _history_before(session: SessionState, node: VersionNode, seq: int) -> list[ChatTurn]:
    return [
        turn
        for n in session.graph.branch_path(node.id)
        for turn in n.turns
        if turn.seq < seq
    ]


def _rederive_reply(engine: Engine, session: SessionState, node: VersionNode, turn: ChatTurn):
    """Rebuild the turn's prompt bundle from persisted state and re-complete it.

    Returns None when the bundle inputs no longer exist (a merge parent was
    deleted later), in which case the turn cannot be audited.
    """
    kind = turn.reply.call_kind
    if kind in DIALOGUE_KINDS:
        template = (
            engine.templates.by_id(turn.template_id) if turn.template_id else None
        )
        context = ContextBundle(
            code=node.code, history=_history_before(session, node, turn.seq)
        )
        examples = []
        if turn.mode is ReflectionMode.GENERAL and len(engine.index) > 0:
            examples = engine.index.retrieve(
                turn.user_prompt, session.settings.fewshot_k
            )
        bundle = engine.forge.build_mode_prompt(
            turn.mode,
            template,
            context,
            examples,
            turn.user_prompt,
            history_limit=session.settings.context_window_turns,
        )
    elif kind == "modify":
        parent = session.graph.nodes.get(node.parent_ids[0]) if node.parent_ids else None
        if parent is None:
            return None
        bundle = engine.forge.build_modify_prompt(parent, turn.user_prompt)
    elif kind == "merge":
        if len(node.parent_ids) != 2:
            return None
        a = session.graph.nodes.get(node.parent_ids[0])
        b = session.graph.nodes.get(node.parent_ids[1])
        if a is None or b is None:
            return None
        bundle = engine.forge.build_merge_prompt(a, b, turn.user_prompt)
    else:
        raise ReplayMismatch(f"turn {turn.seq} has unknown call kind {kind!r}")
    return engine.gateway.complete(bundle)


def _audit_dispatch(engine: Engine, session: SessionState) -> None:
    """Re-run the escalation state machine over the recorded dialogue turns."""
    state = DispatchState()
    for node, turn in _all_turns(session):
        if turn.reply.call_kind not in DIALOGUE_KINDS:
            continue
        decision = state.observe(turn.mode)
        fired = turn.template_id is not None
        if fired != (decision is Decision.TEMPLATE_ELIGIBLE):
            raise ReplayMismatch(
                f"turn {turn.seq}: recorded template firing disagrees with dispatch"
            )
        if fired:
            expected = select_template(
                engine.templates, turn.mode, turn.user_prompt, engine.embed
            )
            if expected.id != turn.template_id:
                raise ReplayMismatch(
                    f"turn {turn.seq}: template {turn.template_id} recorded, "
                    f"{expected.id} selected"
                )
            state.in_template = expected.id
            state.exit_template()
    if state != session.dispatch:
        raise ReplayMismatch("final dispatch state disagrees with the recording")


def _audit_graph(session: SessionState) -> None:
    graph = session.graph
    roots = [n for n in graph.nodes.values() if n.kind is NodeKind.ROOT]
    if len(roots) != 1 or roots[0].parent_ids:
        raise ReplayMismatch("graph does not have exactly one parentless root")
    if graph.active_id not in graph.nodes:
        raise ReplayMismatch("active node does not exist")
    reached = {roots[0].id}
    frontier = [roots[0].id]
    while frontier:
        current = frontier.pop()
        for child in graph.children_of(current):
            if child.id not in reached:
                reached.add(child.id)
                frontier.append(child.id)
    for node in graph.nodes.values():
        if node.id not in reached:
            raise ReplayMismatch(f"node {node.id} is unreachable from the root")
        for pid in node.parent_ids:
            if pid not in graph.nodes or int(pid) >= int(node.id):
                raise ReplayMismatch(f"node {node.id} has an invalid parent {pid!r}")
        expected = {NodeKind.ROOT: (0,), NodeKind.MERGED: (1, 2)}.get(node.kind, (1,))
        if len(node.parent_ids) not in expected:
            raise ReplayMismatch(
                f"node {node.id} ({node.kind.value}) has {len(node.parent_ids)} parents"
            )


def replay_session(
    session_path: str | Path,
    out_path: str | Path | None = None,
    engine: Engine | None = None,
) -> tuple[SessionState, ReplayReport]:
    """Audit a saved mock session by re-deriving everything it recorded.

    Raises ReplayMismatch on the first divergence. When ``out_path`` is
    given, the re-serialized session is written there.
    """
    session_path = Path(session_path)
    original = session_path.read_text("utf-8")
    session = load_session(session_path)
    if engine is None:
        engine = mock_engine()
    report = ReplayReport()

    for node, turn in _all_turns(session):
        reply = _rederive_reply(engine, session, node, turn)
        if reply is None:
            report.turns_skipped.append(turn.seq)
            continue
        recorded = turn.reply
        if (
            reply.fields != recorded.fields
            or reply.raw != recorded.raw
            or reply.repaired != recorded.repaired
            or reply.call_kind != recorded.call_kind
        ):
            raise ReplayMismatch(f"turn {turn.seq}: re-derived reply differs")
        report.turns_checked += 1

    _audit_dispatch(engine, session)
    _audit_graph(session)

    serialized = dumps_session(session)
    report.byte_identical = serialized == original
    if not report.byte_identical:
        raise ReplayMismatch("re-serialized session differs from the file")
    if out_path is not None:
        save_session(session, out_path)
    return session, report


# -- Tree export --

def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_tree(session_path: str | Path, fmt: str) -> str:
    """Render the version tree as DOT or as canonical JSON adjacency."""
    session = load_session(session_path)
    nodes = list(session.graph.nodes.values())
    if fmt == "dot":
        lines = ["digraph reflexa {"]
        for node in nodes:
            parts = (node.id, node.kind.value, node.title)
            label = "\\n".join(_dot_escape(p) for p in parts)
            shape = " shape=doubleoctagon" if node.id == session.graph.active_id else ""
            lines.append(f'  "{node.id}" [label="{label}"{shape}];')
        for node in nodes:
            for pid in node.parent_ids:
                lines.append(f'  "{pid}" -> "{node.id}";')
        lines.append("}")
        return "\n".join(lines) + "\n"
    if fmt == "json":
        doc = {
            "active_id": session.graph.active_id,
            "nodes": [
                {
                    "id": n.id,
                    "kind": n.kind.value,
                    "title": n.title,
                    "parent_ids": list(n.parent_ids),
                }
                for n in nodes
            ],
        }
        return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"
    raise ValueError(f"unknown export format {fmt!r}")

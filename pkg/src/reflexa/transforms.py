"""LLM-backed node operations: modify, merge, and spark-apply.

Each transform calls the gateway first and touches the graph only after a
validated reply comes back, so any gateway failure leaves the session
exactly as it was. The resulting node is activated and the exchange is
recorded as a chat turn on it (merged nodes start their history fresh with
that turn).
"""

from __future__ import annotations

from .dispatch import ReflectionMode
from .gateway import ChatGateway, StructuredReply
from .graph import ChatTurn, NodeKind, VersionNode
from .inspiration import SparkOption
from .prompts import PromptForge
from .session import SessionState

TITLE_CHARS = 40


def _derive_title(instruction: str) -> str:
    return instruction[:TITLE_CHARS]


def _record_transform_turn(
    session: SessionState, instruction: str, reply: StructuredReply, at: int
) -> ChatTurn:
    turn = ChatTurn(
        seq=session.next_turn_seq(),
        mode=ReflectionMode.GENERAL,
        template_id=None,
        user_prompt=instruction,
        reply=reply,
        created_at=at,
    )
    session.graph.record_turn(turn)
    return turn


def modify_node(
    session: SessionState,
    node_id: str,
    instruction: str,
    gateway: ChatGateway,
    forge: PromptForge,
    at: int,
    kind: NodeKind = NodeKind.MODIFIED,
    title: str | None = None,
) -> tuple[VersionNode, StructuredReply]:
    """Derive a new child of ``node_id`` by reworking its code."""
    base = session.graph.node(node_id)
    bundle = forge.build_modify_prompt(base, instruction)
    reply = gateway.complete(bundle)
    node = session.graph.attach(
        kind,
        [base.id],
        reply.fields["code"],
        title if title is not None else _derive_title(instruction),
        at,
    )
    _record_transform_turn(session, instruction, reply, at)
    return node, reply


def merge_nodes(
    session: SessionState,
    a_id: str,
    b_id: str,
    instruction: str,
    gateway: ChatGateway,
    forge: PromptForge,
    at: int,
) -> tuple[VersionNode, StructuredReply]:
    """Fuse two nodes into a child of both, in argument order."""
    a = session.graph.node(a_id)
    b = session.graph.node(b_id)
    bundle = forge.build_merge_prompt(a, b, instruction)
    reply = gateway.complete(bundle)
    node = session.graph.attach(
        NodeKind.MERGED,
        [a.id, b.id],
        reply.fields["code"],
        _derive_title(instruction),
        at,
    )
    _record_transform_turn(session, instruction, reply, at)
    return node, reply


def apply_spark(
    session: SessionState,
    node_id: str,
    spark: SparkOption,
    gateway: ChatGateway,
    forge: PromptForge,
    at: int,
) -> tuple[VersionNode, StructuredReply]:
    """Modify a node using a spark's reference snippet; auto-saved as spark kind."""
    return modify_node(
        session,
        node_id,
        spark.reference,
        gateway,
        forge,
        at,
        kind=NodeKind.SPARK,
        title=spark.label,
    )

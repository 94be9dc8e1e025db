"""Versioned sketch graph: nodes, lifecycle operations, branch-scoped context.

A session owns one ``VersionGraph``: a DAG of sketch states rooted at a
single empty root node. Every structural operation (collect, duplicate,
delete, modify, merge, spark) creates or removes whole nodes; node code is
immutable once created. Chat turns attach to whichever node was active when
they happened, and the dialogue context of a node is the concatenation of
turns along its branch path (see :meth:`VersionGraph.context_of`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .dispatch import ReflectionMode
from .errors import (
    CannotDeleteRootError,
    CannotDuplicateRootError,
    HasChildrenError,
    StaleSequenceError,
    UnknownNodeError,
)
from .gateway import StructuredReply

ROOT_ID = "0"


class NodeKind(str, Enum):
    ROOT = "root"
    COLLECTED = "collected"
    MODIFIED = "modified"
    MERGED = "merged"
    SPARK = "spark"


@dataclass
class ChatTurn:
    """One dialogue exchange, recorded on the node that was active."""

    seq: int
    mode: ReflectionMode
    template_id: str | None
    user_prompt: str
    reply: StructuredReply
    created_at: int


@dataclass
class VersionNode:
    """One collected or derived sketch state."""

    id: str
    parent_ids: list[str]
    kind: NodeKind
    code: str
    title: str
    description: str = ""
    preview_asset: str | None = None
    created_at: int = 0
    turns: list[ChatTurn] = field(default_factory=list)


@dataclass
class ContextBundle:
    """Active code plus the branch-scoped chat history for one node."""

    code: str
    history: list[ChatTurn]


class VersionGraph:
    """The session's DAG of version nodes plus the active-node pointer.

    Node ids are sequential integers rendered as strings ("0" is the root),
    generated from ``next_seq`` so replays assign identical ids. Parents
    always predate children, which keeps the graph acyclic by construction.
    """

    def __init__(self, root_created_at: int = 0):
        root = VersionNode(
            id=ROOT_ID,
            parent_ids=[],
            kind=NodeKind.ROOT,
            code="",
            title="Root",
            created_at=root_created_at,
        )
        self.nodes: dict[str, VersionNode] = {ROOT_ID: root}
        self.active_id: str = ROOT_ID
        self.next_seq: int = 1

    @classmethod
    def from_parts(
        cls, nodes: list[VersionNode], active_id: str, next_seq: int
    ) -> "VersionGraph":
        """Rebuild a graph from persisted parts (node order preserved)."""
        graph = cls.__new__(cls)
        graph.nodes = {node.id: node for node in nodes}
        graph.active_id = active_id
        graph.next_seq = next_seq
        return graph

    # -- Lookup --

    def node(self, node_id: str) -> VersionNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNodeError(f"no node with id {node_id!r}") from None

    @property
    def active(self) -> VersionNode:
        return self.nodes[self.active_id]

    def children_of(self, node_id: str) -> list[VersionNode]:
        return [n for n in self.nodes.values() if node_id in n.parent_ids]

    def max_turn_seq(self) -> int:
        """Highest turn seq recorded anywhere in the session (0 if none)."""
        return max(
            (turn.seq for node in self.nodes.values() for turn in node.turns),
            default=0,
        )

    # -- Structural operations --

    def attach(
        self,
        kind: NodeKind,
        parent_ids: list[str],
        code: str,
        title: str,
        created_at: int,
        description: str = "",
        preview_asset: str | None = None,
        activate: bool = True,
    ) -> VersionNode:
        """Create a node under existing parents; optionally make it active.

        Enforces the indegree law at creation time: exactly two parents for
        merged nodes, exactly one for every other non-root kind.
        """
        for pid in parent_ids:
            if pid not in self.nodes:
                raise UnknownNodeError(f"parent {pid!r} does not exist")
        expected = 2 if kind is NodeKind.MERGED else 1
        if kind is NodeKind.ROOT or len(parent_ids) != expected:
            raise ValueError(f"kind {kind.value} cannot have {len(parent_ids)} parents")
        node = VersionNode(
            id=str(self.next_seq),
            parent_ids=list(parent_ids),
            kind=kind,
            code=code,
            title=title,
            description=description,
            preview_asset=preview_asset,
            created_at=created_at,
        )
        self.next_seq += 1
        self.nodes[node.id] = node
        if activate:
            self.active_id = node.id
        return node

    def collect(self, code: str, title: str, created_at: int,
                preview_asset: str | None = None) -> VersionNode:
        """Save code as a new child of the active node and activate it."""
        return self.attach(
            NodeKind.COLLECTED,
            [self.active_id],
            code,
            title,
            created_at,
            preview_asset=preview_asset,
        )

    def activate(self, node_id: str) -> ContextBundle:
        """Make ``node_id`` active and return its code plus branch history."""
        node = self.node(node_id)
        self.active_id = node.id
        return self.context_of(node.id)

    def duplicate(self, node_id: str, created_at: int) -> VersionNode:
        """Fork a node: copy its code/title under it, without its chat turns.

        The copy has kind ``collected`` (it is a fresh fork seed, whatever
        the source was) and is not auto-activated.
        """
        source = self.node(node_id)
        if source.kind is NodeKind.ROOT:
            raise CannotDuplicateRootError("the root node cannot be duplicated")
        return self.attach(
            NodeKind.COLLECTED,
            [source.id],
            source.code,
            source.title,
            created_at,
            description=source.description,
            preview_asset=source.preview_asset,
            activate=False,
        )

    def delete(self, node_id: str, recursive: bool = False) -> int:
        """Remove a node (and, with ``recursive``, its descendant subtree).

        Merged descendants are removed only when both of their parents fall
        inside the deleted set; otherwise the merge survives and the dangling
        parent reference is dropped (the node keeps its ``merged`` kind for
        provenance). If the active node was removed, activation moves to the
        deleted node's first surviving ancestor.

        Returns the number of removed nodes.
        """
        target = self.node(node_id)
        if target.kind is NodeKind.ROOT:
            raise CannotDeleteRootError("the root node cannot be deleted")
        has_children = any(node_id in n.parent_ids for n in self.nodes.values())
        if has_children and not recursive:
            raise HasChildrenError(f"node {node_id!r} has children; pass recursive")

        # Creation order is a topological order (parents predate children),
        # so one forward pass settles the deleted set.
        doomed = {node_id}
        trimmed: list[tuple[VersionNode, str]] = []
        for node in sorted(self.nodes.values(), key=lambda n: int(n.id)):
            if node.id in doomed or node.kind is NodeKind.ROOT:
                continue
            inside = [p for p in node.parent_ids if p in doomed]
            if not inside:
                continue
            if node.kind is NodeKind.MERGED and len(inside) < len(node.parent_ids):
                trimmed.append((node, inside[0]))
            else:
                doomed.add(node.id)

        for node, dropped in trimmed:
            node.parent_ids.remove(dropped)
        for nid in doomed:
            del self.nodes[nid]
        if self.active_id not in self.nodes:
            self.active_id = target.parent_ids[0]
        return len(doomed)

    # -- Chat turns and context --

    def record_turn(self, turn: ChatTurn) -> None:
        """Append a turn to the active node. Seq must advance monotonically."""
        if turn.seq <= self.max_turn_seq():
            raise StaleSequenceError(f"turn seq {turn.seq} is not past the latest")
        self.active.turns.append(turn)

    def branch_path(self, node_id: str) -> list[VersionNode]:
        """Nodes whose turns form ``node_id``'s dialogue context, in order.

        Walks ancestors through single-parent links. A merged node starts a
        fresh history (its own merge turn is the seed), so the walk stops
        there rather than pulling in either parent branch.
        """
        path = [self.node(node_id)]
        while path[-1].parent_ids and path[-1].kind is not NodeKind.MERGED:
            path.append(self.nodes[path[-1].parent_ids[0]])
        path.reverse()
        return path

    def context_of(self, node_id: str) -> ContextBundle:
        node = self.node(node_id)
        history = [turn for n in self.branch_path(node_id) for turn in n.turns]
        return ContextBundle(code=node.code, history=history)

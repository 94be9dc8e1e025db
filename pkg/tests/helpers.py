"""Independent oracles and shared drivers for the test suite.

Everything here re-derives expected behavior from first principles (path
walks, brute-force scans, explicit run segmentation) so the tests never
lean on the code paths they check.
"""

from __future__ import annotations

import math
import random

from reflexa import (
    ChatTurn,
    Engine,
    MockGateway,
    NodeKind,
    ReflectionMode,
    SessionState,
    StructuredReply,
    TickClock,
)
from reflexa.errors import ProviderError, ReflexaError
from reflexa.gateway import mock_embed_values

R_MODES = (ReflectionMode.R1, ReflectionMode.R2, ReflectionMode.R3)
ALL_MODES = (ReflectionMode.GENERAL,) + R_MODES


def make_turn(seq: int, mode: str = "general", prompt: str = "p",
              template_id: str | None = None) -> ChatTurn:
    reply = StructuredReply(
        fields={"code": f"// c{seq}", "rationale": "-", "summary": "-", "reflection": "?"},
        raw="{}",
        repaired=False,
        call_kind=mode,
    )
    return ChatTurn(
        seq=seq,
        mode=ReflectionMode(mode),
        template_id=template_id,
        user_prompt=prompt,
        reply=reply,
        created_at=seq,
    )


# -- Graph invariants (independent checker) --

def check_graph_invariants(graph) -> None:
    nodes = graph.nodes
    roots = [n for n in nodes.values() if n.kind is NodeKind.ROOT]
    assert len(roots) == 1, "exactly one root"
    assert roots[0].parent_ids == [], "root has no parents"
    assert graph.active_id in nodes, "active node exists"

    children: dict[str, list[str]] = {nid: [] for nid in nodes}
    for node in nodes.values():
        for pid in node.parent_ids:
            assert pid in nodes, f"parent {pid} of {node.id} exists"
            assert int(pid) < int(node.id), "parents strictly predate children"
            children[pid].append(node.id)

    # Brute-force cycle detection (DFS with colors), independent of id order.
    WHITE, GREY, BLACK = 0, 1, 2
    color = {nid: WHITE for nid in nodes}

    def visit(nid: str) -> None:
        color[nid] = GREY
        for child in children[nid]:
            assert color[child] != GREY, "cycle detected"
            if color[child] == WHITE:
                visit(child)
        color[nid] = BLACK

    for nid in nodes:
        if color[nid] == WHITE:
            visit(nid)

    # Reachability from the root.
    seen = {roots[0].id}
    frontier = [roots[0].id]
    while frontier:
        for child in children[frontier.pop()]:
            if child not in seen:
                seen.add(child)
                frontier.append(child)
    assert seen == set(nodes), "every node reachable from root"

    # Indegree law (merged may have dropped to one parent after deletes).
    for node in nodes.values():
        if node.kind is NodeKind.ROOT:
            assert len(node.parent_ids) == 0
        elif node.kind is NodeKind.MERGED:
            assert len(node.parent_ids) in (1, 2)
        else:
            assert len(node.parent_ids) == 1


def history_oracle(graph, node_id: str) -> list:
    """Independent branch-history walk: climb single parents, stop at a merge."""
    chain = []
    current = graph.nodes[node_id]
    while True:
        chain.append(current)
        if current.kind is NodeKind.MERGED or not current.parent_ids:
            break
        current = graph.nodes[current.parent_ids[0]]
    chain.reverse()
    return [turn for node in chain for turn in node.turns]


# -- Dispatch oracle --

def dispatch_oracle(modes: list[ReflectionMode]) -> list[bool]:
    """Template fires on the 2nd consecutive same-R-mode turn since the last
    fire; the general mode never fires."""
    fires = []
    last_fire = -1
    for i, mode in enumerate(modes):
        j = i
        while j - 1 > last_fire and modes[j - 1] is mode:
            j -= 1
        fired = mode in R_MODES and i > j
        if fired:
            last_fire = i
        fires.append(fired)
    return fires


def all_mode_sequences(max_len: int = 4):
    def extend(prefix):
        if prefix:
            yield list(prefix)
        if len(prefix) == max_len:
            return
        for mode in ALL_MODES:
            yield from extend(prefix + [mode])

    yield from extend([])


# -- Retrieval oracle --

def retrieval_oracle(entries, query: str, k: int, dim: int = 64) -> list[str]:
    """Brute-force full-scan ranking with independent cosine arithmetic."""
    qv = mock_embed_values(query, dim)

    def sim(entry) -> float:
        ev = mock_embed_values(entry.description, dim)
        dot = math.fsum(x * y for x, y in zip(qv, ev))
        nq = math.sqrt(math.fsum(x * x for x in qv))
        ne = math.sqrt(math.fsum(y * y for y in ev))
        return dot / (nq * ne)

    ranked = sorted(entries, key=lambda e: (-sim(e), e.id))
    return [e.id for e in ranked[:k]]


# -- Randomized operation driver --

class FailableMockGateway(MockGateway):
    """Mock gateway with an injectable one-shot provider failure."""

    def __init__(self):
        super().__init__()
        self.fail_next = False

    def complete(self, bundle):
        if self.fail_next:
            self.fail_next = False
            raise ProviderError("injected failure")
        return super().complete(bundle)


def random_ops_driver(seed: int, op_count: int, on_each=None) -> SessionState:
    """Drive a mock engine with random structural + LLM-backed operations.

    Injects gateway failures at random and asserts atomic rollback; expected
    engine errors (root deletes, has-children) are tolerated. ``on_each``
    runs after every successful operation.
    """
    from reflexa.persistence import dumps_session

    rng = random.Random(seed)
    gateway = FailableMockGateway()
    engine = Engine(gateway=gateway, clock=TickClock(), id_factory=lambda: f"fuzz{seed}")
    session = engine.create_session()
    graph = session.graph

    def any_node() -> str:
        return rng.choice(list(graph.nodes))

    for step in range(op_count):
        op = rng.choice(("collect", "duplicate", "delete", "modify", "merge", "spark"))
        inject = op in ("modify", "merge", "spark") and rng.random() < 0.15
        before_count = len(graph.nodes)
        snapshot = dumps_session(session) if inject else None
        if inject:
            gateway.fail_next = True
        try:
            if op == "collect":
                engine.collect(session, f"// step {step}", f"t{step}")
            elif op == "duplicate":
                engine.duplicate(session, any_node())
            elif op == "delete":
                removed = engine.delete(session, any_node(), rng.random() < 0.5)
                assert before_count == len(graph.nodes) + removed, "delete conservation"
            elif op == "modify":
                engine.modify(session, any_node(), f"tweak {step}")
            elif op == "merge":
                a, b = any_node(), any_node()
                engine.merge(session, a, b, f"fuse {step}")
            elif op == "spark":
                spark = rng.choice(engine.sparks.options)
                engine.spark(session, any_node(), spark.id)
        except ProviderError:
            assert inject, "provider errors only occur when injected"
            assert dumps_session(session) == snapshot, "atomic rollback"
            continue
        except ReflexaError:
            gateway.fail_next = False
            continue  # expected client-fault errors (root delete, has-children, ...)
        assert not gateway.fail_next, "injected failure must have fired"
        if on_each is not None:
            on_each(session)
    return session

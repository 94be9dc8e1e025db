import pytest
from helpers import check_graph_invariants, history_oracle, make_turn
from hypothesis import given, settings, strategies as st

from reflexa import NodeKind, SessionSettings, TickClock, VersionGraph, create_session
from reflexa.errors import (
    CannotDeleteRootError,
    CannotDuplicateRootError,
    HasChildrenError,
    InvalidSettingsError,
    StaleSequenceError,
    UnknownNodeError,
)


def fresh():
    return VersionGraph(root_created_at=0)


# -- create_session --

def test_create_session_initial_state():
    state = create_session(SessionSettings(), "sid", 0)
    assert len(state.graph.nodes) == 1
    root = state.graph.nodes["0"]
    assert root.kind is NodeKind.ROOT
    assert root.code == "" and root.turns == []
    assert state.graph.active_id == "0"
    assert state.dispatch.last_mode is None and state.dispatch.run_length == 0


def test_create_session_rejects_bad_settings():
    with pytest.raises(InvalidSettingsError):
        create_session(SessionSettings(context_window_turns=0), "sid", 0)
    with pytest.raises(InvalidSettingsError):
        create_session(SessionSettings(fewshot_k=0), "sid", 0)
    with pytest.raises(InvalidSettingsError):
        create_session(SessionSettings(chat_model=""), "sid", 0)


def test_two_sessions_identical_shape():
    from reflexa.persistence import session_to_doc

    a = create_session(SessionSettings(), "ida", 0)
    b = create_session(SessionSettings(), "idb", 0)
    doc_a, doc_b = session_to_doc(a), session_to_doc(b)
    assert doc_a["session_id"] != doc_b["session_id"]
    doc_a["session_id"] = doc_b["session_id"] = "x"
    assert doc_a == doc_b


# -- collect --

def test_collect_on_fresh_session():
    g = fresh()
    node = g.collect("let x;", "first", 1)
    assert node.parent_ids == ["0"]
    assert node.kind is NodeKind.COLLECTED
    assert g.active_id == node.id
    assert node.turns == []


def test_three_collects_form_chain():
    g = fresh()
    ids = [g.collect(f"c{i}", f"t{i}", i + 1).id for i in range(3)]
    # Replay the parent chain from the leaf back to the root.
    chain = []
    current = g.nodes[ids[-1]]
    while current.parent_ids:
        chain.append(current.id)
        current = g.nodes[current.parent_ids[0]]
    assert chain == list(reversed(ids))
    assert current.id == "0"


def test_collect_empty_code_allowed():
    g = fresh()
    node = g.collect("", "empty", 1)
    assert node.code == ""


# -- activate --

def test_activate_root_fresh():
    g = fresh()
    bundle = g.activate("0")
    assert bundle.code == "" and bundle.history == []


def test_activate_returns_path_history():
    g = fresh()
    a = g.collect("a", "A", 1)
    t1 = make_turn(1)
    g.record_turn(t1)
    b = g.collect("b", "B", 2)
    t2 = make_turn(2)
    g.record_turn(t2)
    bundle = g.activate(b.id)
    assert bundle.history == [t1, t2]
    assert bundle.history == history_oracle(g, b.id)
    assert g.activate(a.id).history == [t1]


def test_activate_unknown_node():
    with pytest.raises(UnknownNodeError):
        fresh().activate("99")


# -- duplicate --

def test_duplicate_copies_code_not_turns():
    g = fresh()
    a = g.collect("code-a", "A", 1)
    g.record_turn(make_turn(1))
    dup = g.duplicate(a.id, 2)
    assert dup.parent_ids == [a.id]
    assert dup.code == a.code and dup.title == a.title
    assert dup.turns == []
    assert g.active_id == a.id  # not auto-activated


def test_duplicate_root_rejected():
    with pytest.raises(CannotDuplicateRootError):
        fresh().duplicate("0", 1)


def test_duplicate_twice_distinct_siblings():
    g = fresh()
    a = g.collect("x", "A", 1)
    d1 = g.duplicate(a.id, 2)
    d2 = g.duplicate(a.id, 3)
    assert d1.id != d2.id
    assert d1.parent_ids == d2.parent_ids == [a.id]


# -- delete --

def test_delete_leaf():
    g = fresh()
    a = g.collect("x", "A", 1)
    assert g.delete(a.id) == 1
    assert a.id not in g.nodes
    assert g.active_id == "0"


def test_delete_nonrecursive_with_children():
    g = fresh()
    a = g.collect("x", "A", 1)
    g.collect("y", "B", 2)
    with pytest.raises(HasChildrenError):
        g.delete(a.id, recursive=False)


def test_delete_recursive_chain_moves_active():
    g = fresh()
    a = g.collect("a", "A", 1)
    g.collect("b", "B", 2)
    g.collect("c", "C", 3)
    # Subtree enumeration oracle: a, b, c are exactly the descendants of a.
    assert g.delete(a.id, recursive=True) == 3
    assert set(g.nodes) == {"0"}
    assert g.active_id == "0"


def test_delete_root_rejected():
    with pytest.raises(CannotDeleteRootError):
        fresh().delete("0")


def test_delete_conservation_and_reachability():
    g = fresh()
    a = g.collect("a", "A", 1)
    g.collect("b", "B", 2)
    g.activate(a.id)
    g.collect("c", "C", 3)
    before = len(g.nodes)
    removed = g.delete(a.id, recursive=True)
    assert before == len(g.nodes) + removed
    check_graph_invariants(g)


def test_delete_keeps_merge_with_surviving_parent():
    g = fresh()
    a = g.collect("a", "A", 1)
    g.activate("0")
    b = g.collect("b", "B", 2)
    m = g.attach(NodeKind.MERGED, [a.id, b.id], "m", "M", 3)
    removed = g.delete(a.id, recursive=True)
    assert removed == 1  # only a; the merge survives
    assert m.id in g.nodes
    assert g.nodes[m.id].parent_ids == [b.id]
    assert g.nodes[m.id].kind is NodeKind.MERGED  # provenance kept
    check_graph_invariants(g)


def test_delete_removes_merge_when_both_parents_doomed():
    g = fresh()
    a = g.collect("a", "A", 1)
    b = g.collect("b", "B", 2)  # child of a
    g.activate(a.id)
    c = g.collect("c", "C", 3)  # second child of a
    m = g.attach(NodeKind.MERGED, [b.id, c.id], "m", "M", 4)
    removed = g.delete(a.id, recursive=True)
    assert removed == 4  # a, b, c, m
    assert m.id not in g.nodes
    check_graph_invariants(g)


# -- record_turn --

def test_record_then_activate_includes_turn():
    g = fresh()
    a = g.collect("a", "A", 1)
    turn = make_turn(1)
    g.record_turn(turn)
    assert g.activate(a.id).history[-1] is turn


def test_branch_isolation():
    g = fresh()
    a = g.collect("a", "A", 1)
    turn_a = make_turn(1)
    g.record_turn(turn_a)
    g.activate("0")
    sibling = g.collect("a2", "A2", 2)
    assert turn_a not in g.context_of(sibling.id).history
    assert g.context_of(sibling.id).history == history_oracle(g, sibling.id)
    # A duplicate, by contrast, forks below its source and inherits its history.
    dup = g.duplicate(a.id, 3)
    assert g.context_of(dup.id).history == [turn_a]


def test_stale_sequence_rejected():
    g = fresh()
    g.collect("a", "A", 1)
    g.record_turn(make_turn(5))
    with pytest.raises(StaleSequenceError):
        g.record_turn(make_turn(5))
    with pytest.raises(StaleSequenceError):
        g.record_turn(make_turn(3))


# -- merged-node history --

def test_merge_history_starts_fresh():
    g = fresh()
    a = g.collect("a", "A", 1)
    g.record_turn(make_turn(1))
    g.activate("0")
    b = g.collect("b", "B", 2)
    g.record_turn(make_turn(2))
    m = g.attach(NodeKind.MERGED, [a.id, b.id], "m", "M", 3)
    g.record_turn(make_turn(3))
    history = g.context_of(m.id).history
    assert [t.seq for t in history] == [3]
    # Children of the merge inherit from the merge down.
    child = g.collect("d", "D", 4)
    assert [t.seq for t in g.context_of(child.id).history] == [3]


# -- Property tests --

@st.composite
def graph_op_scripts(draw):
    return draw(
        st.lists(
            st.tuples(
                st.sampled_from(("collect", "duplicate", "delete", "activate", "merge")),
                st.integers(0, 10_000),
            ),
            max_size=40,
        )
    )


def apply_random_ops(ops) -> VersionGraph:
    g = fresh()
    clock = TickClock(start=1)
    for op, pick in ops:
        ids = sorted(g.nodes, key=int)
        target = ids[pick % len(ids)]
        try:
            if op == "collect":
                g.collect(f"c-{pick}", f"t-{pick}", clock.now_ms())
            elif op == "duplicate":
                g.duplicate(target, clock.now_ms())
            elif op == "delete":
                g.delete(target, recursive=pick % 2 == 0)
            elif op == "activate":
                g.activate(target)
            elif op == "merge":
                other = ids[(pick // 7) % len(ids)]
                if other != target:
                    g.attach(NodeKind.MERGED, [target, other], "m", "M", clock.now_ms())
        except (CannotDeleteRootError, CannotDuplicateRootError, HasChildrenError):
            pass
    return g


@given(graph_op_scripts())
@settings(max_examples=120, deadline=None)
def test_random_ops_keep_invariants(ops):
    g = apply_random_ops(ops)
    check_graph_invariants(g)
    # Topological sort succeeds (stdlib oracle) on instances this size.
    import graphlib

    sorter = graphlib.TopologicalSorter(
        {nid: list(node.parent_ids) for nid, node in g.nodes.items()}
    )
    assert len(list(sorter.static_order())) == len(g.nodes)


@given(graph_op_scripts())
@settings(max_examples=60, deadline=None)
def test_history_matches_oracle_everywhere(ops):
    g = apply_random_ops(ops)
    seq = 1
    for nid in list(g.nodes):
        g.activate(nid)
        g.record_turn(make_turn(seq))
        seq += 1
    for nid in g.nodes:
        assert g.context_of(nid).history == history_oracle(g, nid)

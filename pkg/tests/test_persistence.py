import json
import os

import pytest
from helpers import random_ops_driver

from reflexa import ReflectionMode, load_session, save_session
from reflexa.errors import CorruptFileError, PersistenceError, SchemaVersionMismatchError
from reflexa.persistence import dumps_session, session_to_doc


def test_round_trip_fresh_session(engine, tmp_path):
    session = engine.create_session()
    path = save_session(session, tmp_path / "s.json")
    loaded = load_session(path)
    assert session_to_doc(loaded) == session_to_doc(session)
    assert dumps_session(loaded) == dumps_session(session)


def test_round_trip_after_thirty_mixed_operations(tmp_path):
    session = random_ops_driver(seed=11, op_count=30)
    path = save_session(session, tmp_path / "s.json")
    loaded = load_session(path)
    # Deep structural diff, field for field, timestamps verbatim.
    assert session_to_doc(loaded) == session_to_doc(session)
    # And the reloaded state re-serializes to the same bytes.
    assert path.read_text("utf-8") == dumps_session(loaded)


def test_round_trip_preserves_dialogue(engine, tmp_path):
    session = engine.create_session()
    engine.collect(session, "// code", "node")
    engine.send_turn(session, ReflectionMode.R1, "why?")
    engine.send_turn(session, ReflectionMode.R1, "clarify goal please")
    path = save_session(session, tmp_path / "s.json")
    loaded = load_session(path)
    node = loaded.graph.node(loaded.graph.active_id)
    assert [t.template_id for t in node.turns] == [None, "r1-clarify-goal"]
    assert loaded.next_turn_seq() == session.next_turn_seq()


def test_schema_version_mismatch(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"schema_version": 999}), encoding="utf-8")
    with pytest.raises(SchemaVersionMismatchError):
        load_session(path)


def test_corrupt_file_not_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{truncated", encoding="utf-8")
    with pytest.raises(CorruptFileError):
        load_session(path)


def test_corrupt_file_missing_fields(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"schema_version": 1, "session_id": "x"}), encoding="utf-8")
    with pytest.raises(CorruptFileError):
        load_session(path)


def test_missing_file_is_io_error(tmp_path):
    with pytest.raises(PersistenceError):
        load_session(tmp_path / "nope.json")


def test_crash_between_write_and_rename_leaves_original(engine, tmp_path, monkeypatch):
    session = engine.create_session()
    path = save_session(session, tmp_path / "s.json")
    original = path.read_bytes()

    engine.collect(session, "// new", "new node")

    def killed(src, dst):
        raise OSError("simulated kill before rename")

    monkeypatch.setattr(os, "replace", killed)
    with pytest.raises(PersistenceError):
        save_session(session, path)
    monkeypatch.undo()

    # The original file is untouched and still loads; no temp litter.
    assert path.read_bytes() == original
    assert load_session(path).graph.nodes.keys() == {"0"}
    assert list(tmp_path.glob("*.tmp")) == []


def test_file_schema_key_order(engine, tmp_path):
    session = engine.create_session()
    engine.collect(session, "// c", "n")
    engine.send_turn(session, ReflectionMode.GENERAL, "hello")
    doc = json.loads(dumps_session(session))
    assert list(doc) == [
        "schema_version",
        "session_id",
        "created_at",
        "settings",
        "dispatch_state",
        "active_id",
        "next_seq",
        "nodes",
    ]
    assert list(doc["settings"]) == [
        "chat_model",
        "embed_model",
        "context_window_turns",
        "fewshot_k",
        "mock",
    ]
    assert list(doc["dispatch_state"]) == ["last_mode", "run_length", "in_template"]
    node = doc["nodes"][1]
    assert list(node) == [
        "id",
        "parent_ids",
        "kind",
        "code",
        "title",
        "description",
        "preview_asset",
        "created_at",
        "turns",
    ]
    turn = node["turns"][0]
    assert list(turn) == ["seq", "mode", "template_id", "user_prompt", "reply", "created_at"]
    assert list(turn["reply"]) == ["fields", "raw", "repaired", "call_kind"]

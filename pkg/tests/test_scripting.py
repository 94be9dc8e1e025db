import json
import re
from pathlib import Path

import pytest

from reflexa import export_tree, load_session, replay_session, run_script
from reflexa.cli import main
from reflexa.errors import ScriptParseError
from reflexa.scripting import ReplayMismatch, script_session_id, summarize_graph

DATA = Path(__file__).parent / "data"
FOURTEEN = DATA / "fourteen_turns.json"


def write_script(tmp_path, commands, name="script.json"):
    path = tmp_path / name
    path.write_text(json.dumps(commands), encoding="utf-8")
    return path


# -- run_script --

def test_empty_script_yields_root_only(tmp_path):
    script = write_script(tmp_path, [])
    session, out = run_script(script)
    assert list(session.graph.nodes) == ["0"]
    assert out.exists()


def test_fourteen_turn_script_is_deterministic(tmp_path):
    _, out1 = run_script(FOURTEEN, out_path=tmp_path / "one.json")
    _, out2 = run_script(FOURTEEN, out_path=tmp_path / "two.json")
    assert out1.read_bytes() == out2.read_bytes()
    session = load_session(out1)
    dialogue = [
        t for n in session.graph.nodes.values() for t in n.turns
        if t.reply.call_kind in {"general", "r1", "r2", "r3", "template"}
    ]
    assert len(dialogue) == 14
    templated = sorted(t.template_id for t in dialogue if t.template_id)
    assert templated == [
        "r1-clarify-goal",
        "r2-conceptual-connections",
        "r2-module-experience-relations",
        "r3-reevaluate-shift-visual-style",
    ]


def test_script_session_id_is_content_derived(tmp_path):
    a = write_script(tmp_path, [], name="a.json")
    session, _ = run_script(a, out_path=tmp_path / "out.json")
    assert session.session_id == script_session_id(a.read_bytes())


def test_script_parse_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ScriptParseError):
        run_script(bad)
    with pytest.raises(ScriptParseError):
        run_script(write_script(tmp_path, [{"op": "warp"}]))
    with pytest.raises(ScriptParseError):
        run_script(write_script(tmp_path, {"op": "turn"}, name="notalist.json"))


def test_engine_error_saves_partial_session(tmp_path, capsys):
    script = write_script(
        tmp_path,
        [
            {"op": "collect", "code": "x", "title": "A"},
            {"op": "merge", "a": "1", "b": "99", "instruction": "fuse"},
        ],
    )
    code = main(["run", str(script), "--mock", "--out", str(tmp_path / "out.json")])
    assert code == 2
    captured = capsys.readouterr()
    assert "unknown-node" in captured.err
    partial = load_session(tmp_path / "out.json")
    assert set(partial.graph.nodes) == {"0", "1"}


def test_summarize_graph_lists_nodes(tmp_path):
    session, _ = run_script(FOURTEEN, out_path=tmp_path / "s.json")
    summary = summarize_graph(session)
    assert f"session {session.session_id}" in summary
    assert "[merged]" in summary and "[spark]" in summary


# -- replay --

def test_replay_verifies_and_matches_bytes(tmp_path):
    _, out = run_script(FOURTEEN, out_path=tmp_path / "s.json")
    session, report = replay_session(out, out_path=tmp_path / "replayed.json")
    assert report.byte_identical
    assert report.turns_skipped == []
    assert report.turns_checked == 17  # 14 dialogue turns + modify + merge + spark
    assert (tmp_path / "replayed.json").read_bytes() == out.read_bytes()


def test_replay_detects_tampered_reply(tmp_path):
    _, out = run_script(FOURTEEN, out_path=tmp_path / "s.json")
    doc = json.loads(out.read_text("utf-8"))
    doc["nodes"][1]["turns"][0]["reply"]["fields"]["code"] = "// forged"
    out.write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    with pytest.raises(ReplayMismatch):
        replay_session(out)


def test_replay_detects_tampered_dispatch(tmp_path):
    _, out = run_script(FOURTEEN, out_path=tmp_path / "s.json")
    doc = json.loads(out.read_text("utf-8"))
    doc["dispatch_state"]["run_length"] = 7
    out.write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    with pytest.raises(ReplayMismatch):
        replay_session(out)


# -- export --

def test_export_dot_linear_chain(tmp_path):
    script = write_script(
        tmp_path,
        [
            {"op": "collect", "code": "a", "title": "A"},
            {"op": "collect", "code": "b", "title": "B"},
            {"op": "collect", "code": "c", "title": "C"},
        ],
    )
    _, out = run_script(script)
    dot = export_tree(out, "dot")
    assert dot.startswith("digraph")
    edges = re.findall(r'"(\d+)" -> "(\d+)";', dot)
    assert len(edges) == 3
    assert ("0", "1") in edges and ("1", "2") in edges and ("2", "3") in edges


def test_export_dot_merge_has_indegree_two(tmp_path):
    _, out = run_script(FOURTEEN, out_path=tmp_path / "s.json")
    dot = export_tree(out, "dot")
    edges = re.findall(r'"(\d+)" -> "(\d+)";', dot)
    indegree = {}
    for _, dst in edges:
        indegree[dst] = indegree.get(dst, 0) + 1
    assert sorted(indegree.values(), reverse=True)[0] == 2
    assert sum(1 for v in indegree.values() if v == 2) == 1


def test_export_json_matches_session_adjacency(tmp_path):
    _, out = run_script(FOURTEEN, out_path=tmp_path / "s.json")
    exported = json.loads(export_tree(out, "json"))
    session = load_session(out)
    assert exported["active_id"] == session.graph.active_id
    expected = {
        n.id: {"kind": n.kind.value, "title": n.title, "parent_ids": list(n.parent_ids)}
        for n in session.graph.nodes.values()
    }
    got = {
        n["id"]: {"kind": n["kind"], "title": n["title"], "parent_ids": n["parent_ids"]}
        for n in exported["nodes"]
    }
    assert got == expected


def test_export_unknown_format(tmp_path):
    _, out = run_script(write_script(tmp_path, []))
    with pytest.raises(ValueError):
        export_tree(out, "yaml")


# -- CLI surface --

def test_cli_run_and_replay_and_export(tmp_path, capsys):
    out = tmp_path / "session.json"
    assert main(["run", str(FOURTEEN), "--mock", "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "nodes" in printed and str(out) in printed

    assert main(["replay", str(out)]) == 0
    assert "byte-identical" in capsys.readouterr().out

    assert main(["export", str(out), "--format", "dot"]) == 0
    assert "digraph" in capsys.readouterr().out


def test_cli_new_creates_session_file(tmp_path, capsys):
    out = tmp_path / "fresh.json"
    assert main(["new", "--mock", "--out", str(out)]) == 0
    assert load_session(out).graph.active_id == "0"


def test_cli_usage_errors_exit_one(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["rice", "1", "2"])
    assert exc.value.code == 1
    bad = tmp_path / "bad.json"
    bad.write_text("nope", encoding="utf-8")
    assert main(["run", str(bad), "--mock"]) == 1


def test_cli_missing_session_file_exits_three(tmp_path):
    assert main(["export", str(tmp_path / "ghost.json"), "--format", "dot"]) == 3


def test_cli_rice(capsys):
    assert main(["rice", "7", "7", "7", "1", "1", "1", "7", "7", "1"]) == 0
    scores = json.loads(capsys.readouterr().out)
    assert scores == {"total": 5.0, "cp": 7.0, "se": 1.0, "ex": 7.0}
    assert main(["rice", "9", "1", "1", "1", "1", "1", "1", "1", "1"]) == 2

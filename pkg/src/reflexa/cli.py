"""Command-line driver.

Subcommands: new, run, replay, export, rice, serve.
Exit codes: 0 ok, 1 usage, 2 engine error, 3 io.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .clock import TickClock
from .engine import Engine, mock_engine
from .errors import (
    CorpusMissingError,
    PersistenceError,
    ReflexaError,
    ScriptParseError,
)
from .persistence import save_session
from .rice import score_rice
from .scripting import export_tree, replay_session, run_script, summarize_graph
from .session import SessionSettings

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ENGINE = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="reflexa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_new = sub.add_parser("new", help="create a fresh session file")
    p_new.add_argument("--out", default="session.json")
    p_new.add_argument("--mock", action="store_true")

    p_run = sub.add_parser("run", help="run a scripted session")
    p_run.add_argument("script")
    p_run.add_argument("--mock", action="store_true")
    p_run.add_argument("--out", default=None)

    p_replay = sub.add_parser("replay", help="audit a saved mock session")
    p_replay.add_argument("session")
    p_replay.add_argument("--out", default=None)

    p_export = sub.add_parser("export", help="export the version tree")
    p_export.add_argument("session")
    p_export.add_argument("--format", choices=("dot", "json"), required=True)

    p_rice = sub.add_parser("rice", help="score a 9-item reflection questionnaire")
    p_rice.add_argument("items", nargs=9, type=float)
    p_rice.add_argument("--scale", nargs=2, type=float, default=(1, 7),
                        metavar=("LO", "HI"))

    p_serve = sub.add_parser("serve", help="run the REST service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--sessions-dir", default="sessions")
    p_serve.add_argument("--corpus", default=None)
    p_serve.add_argument("--static-dir", default=None,
                         help="optionally serve a built web UI from this directory")
    p_serve.add_argument("--mock", action="store_true")
    return parser


def _engine_for(mock: bool, deterministic: bool = False, **kwargs) -> Engine:
    if mock:
        clock = TickClock() if deterministic else None
        return mock_engine(clock=clock, **kwargs)
    return Engine(**kwargs)


def _cmd_new(args) -> int:
    engine = _engine_for(args.mock, deterministic=args.mock)
    session = engine.create_session(SessionSettings(mock=engine.gateway.is_mock))
    save_session(session, args.out)
    print(f"created session {session.session_id} at {args.out}")
    return EXIT_OK


def _cmd_run(args) -> int:
    engine = None
    if not args.mock:
        engine = Engine()
    try:
        session, out = run_script(args.script, out_path=args.out, engine=engine)
    except ReflexaError as exc:
        if isinstance(exc, ScriptParseError):
            raise
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_ENGINE
    print(summarize_graph(session))
    print(f"saved {out}")
    return EXIT_OK


def _cmd_replay(args) -> int:
    session, report = replay_session(args.session, out_path=args.out)
    print(
        f"replay ok: {report.turns_checked} turns re-derived"
        + (f", {len(report.turns_skipped)} skipped" if report.turns_skipped else "")
        + ", file byte-identical"
    )
    if args.out:
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_export(args) -> int:
    sys.stdout.write(export_tree(args.session, args.format))
    return EXIT_OK


def _cmd_rice(args) -> int:
    lo, hi = args.scale
    score = score_rice(args.items, lo=lo, hi=hi)
    print(json.dumps(score.as_dict()))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    engine = _engine_for(args.mock, corpus_dir=args.corpus)
    app = create_app(engine, args.sessions_dir)
    if args.static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=args.static_dir, html=True), name="ui")
    try:
        uvicorn.run(app, host=args.host, port=args.port)
    except OSError as exc:
        print(f"error [bind-failure]: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


_COMMANDS = {
    "new": _cmd_new,
    "run": _cmd_run,
    "replay": _cmd_replay,
    "export": _cmd_export,
    "rice": _cmd_rice,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ScriptParseError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    except (PersistenceError, CorpusMissingError) as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error [io-error]: {exc}", file=sys.stderr)
        return EXIT_IO
    except ReflexaError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())

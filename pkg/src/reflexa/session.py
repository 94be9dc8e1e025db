"""Session state: settings, the version graph, and dispatch state."""

from __future__ import annotations

from dataclasses import dataclass, field

from .dispatch import DispatchState
from .errors import InvalidSettingsError
from .gateway import DEFAULT_CHAT_MODEL, DEFAULT_EMBED_MODEL
from .graph import VersionGraph
from .prompts import DEFAULT_HISTORY_TURNS

DEFAULT_FEWSHOT_K = 3


@dataclass
class SessionSettings:
    chat_model: str = DEFAULT_CHAT_MODEL
    embed_model: str = DEFAULT_EMBED_MODEL
    context_window_turns: int = DEFAULT_HISTORY_TURNS
    fewshot_k: int = DEFAULT_FEWSHOT_K
    mock: bool = False

    def validate(self) -> None:
        if not self.chat_model or not self.embed_model:
            raise InvalidSettingsError("model names must be nonempty")
        if self.context_window_turns < 1:
            raise InvalidSettingsError("context_window_turns must be at least 1")
        if self.fewshot_k < 1:
            raise InvalidSettingsError("fewshot_k must be at least 1")


@dataclass
class SessionState:
    """Everything persisted for one session."""

    session_id: str
    created_at: int
    settings: SessionSettings
    graph: VersionGraph
    dispatch: DispatchState = field(default_factory=DispatchState)

    def next_turn_seq(self) -> int:
        return self.graph.max_turn_seq() + 1


def create_session(
    settings: SessionSettings, session_id: str, created_at: int
) -> SessionState:
    """Build a fresh session: one active root node, dispatch state reset."""
    settings.validate()
    return SessionState(
        session_id=session_id,
        created_at=created_at,
        settings=settings,
        graph=VersionGraph(root_created_at=created_at),
        dispatch=DispatchState(),
    )

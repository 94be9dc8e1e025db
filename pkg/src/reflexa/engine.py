"""The engine facade: one object wiring dispatch, prompts, gateway, and graph.

All session mutations flow through here. The engine owns the shared
collaborators (prompt forge, template catalog, spark catalog, inspiration
index, gateway, clock, id factory); sessions themselves are plain state.

Per-session mock override: a session created with ``mock=True`` completes
against the deterministic mock backend even when the engine's own gateway is
real. Embeddings for retrieval and template selection always use the
engine-level gateway so that queries stay in the same vector space as the
ingested corpus.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .clock import SystemClock
from .dispatch import (
    Decision,
    ReflectionMode,
    TemplateCatalog,
    load_template_catalog,
    select_template,
)
from .errors import CorpusMissingError
from .gateway import ChatGateway, MockGateway, StructuredReply, gateway_from_env
from .graph import ChatTurn, ContextBundle, VersionNode
from .inspiration import InspirationIndex, SparkCatalog, SparkOption, shipped_corpus_dir
from .prompts import PromptForge
from .session import SessionSettings, SessionState, create_session
from .transforms import apply_spark, merge_nodes, modify_node


@dataclass
class TurnResult:
    decision: Decision
    template_id: str | None
    reply: StructuredReply
    turn: ChatTurn


def _default_id_factory() -> str:
    return uuid.uuid4().hex[:12]


class Engine:
    def __init__(
        self,
        gateway: ChatGateway | None = None,
        clock=None,
        id_factory: Callable[[], str] | None = None,
        corpus_dir: str | Path | None = None,
        cache_dir: str | Path | None = None,
        templates: TemplateCatalog | None = None,
        sparks: SparkCatalog | None = None,
    ):
        self.gateway = gateway if gateway is not None else gateway_from_env()
        self.clock = clock if clock is not None else SystemClock()
        self.id_factory = id_factory or _default_id_factory
        self.forge = PromptForge()
        self.templates = templates if templates is not None else load_template_catalog()
        self.sparks = sparks if sparks is not None else SparkCatalog()
        self.index = InspirationIndex(self.gateway.embed)
        self._mock_gateway: MockGateway | None = None

        corpus = Path(corpus_dir) if corpus_dir is not None else shipped_corpus_dir()
        if not corpus.is_dir():
            raise CorpusMissingError(f"inspiration corpus not found at {corpus}")
        self.index.ingest(corpus, cache_dir=cache_dir)

    # -- Wiring helpers --

    def embed(self, text: str):
        return self.gateway.embed(text)

    def _gateway_for(self, session: SessionState) -> ChatGateway:
        if session.settings.mock and not self.gateway.is_mock:
            if self._mock_gateway is None:
                self._mock_gateway = MockGateway()
            return self._mock_gateway
        return self.gateway

    # -- Session lifecycle --

    def create_session(self, settings: SessionSettings | None = None) -> SessionState:
        if settings is None:
            settings = SessionSettings(mock=self.gateway.is_mock)
        return create_session(settings, self.id_factory(), self.clock.now_ms())

    # -- Dialogue --

    def send_turn(
        self, session: SessionState, mode: ReflectionMode, prompt: str
    ) -> TurnResult:
        """Run one dialogue turn through dispatch, prompting, and the model.

        Failures anywhere (template selection, gateway) restore the dispatch
        state and record nothing: a failed turn has no side effects.
        """
        saved_dispatch = session.dispatch.copy()
        try:
            decision = session.dispatch.observe(mode)
            template = None
            if decision is Decision.TEMPLATE_ELIGIBLE:
                template = select_template(self.templates, mode, prompt, self.embed)
                session.dispatch.in_template = template.id
            context = session.graph.context_of(session.graph.active_id)
            examples = []
            if mode is ReflectionMode.GENERAL and len(self.index) > 0:
                examples = self.index.retrieve(prompt, session.settings.fewshot_k)
            bundle = self.forge.build_mode_prompt(
                mode,
                template,
                context,
                examples,
                prompt,
                history_limit=session.settings.context_window_turns,
            )
            reply = self._gateway_for(session).complete(bundle)
        except Exception:
            session.dispatch = saved_dispatch
            raise
        turn = ChatTurn(
            seq=session.next_turn_seq(),
            mode=mode,
            template_id=template.id if template else None,
            user_prompt=prompt,
            reply=reply,
            created_at=self.clock.now_ms(),
        )
        session.graph.record_turn(turn)
        if template is not None:
            session.dispatch.exit_template()
        return TurnResult(decision, turn.template_id, reply, turn)

    # -- Structural operations --

    def collect(
        self,
        session: SessionState,
        code: str,
        title: str,
        preview_asset: str | None = None,
    ) -> VersionNode:
        return session.graph.collect(code, title, self.clock.now_ms(), preview_asset)

    def activate(self, session: SessionState, node_id: str) -> ContextBundle:
        return session.graph.activate(node_id)

    def duplicate(self, session: SessionState, node_id: str) -> VersionNode:
        return session.graph.duplicate(node_id, self.clock.now_ms())

    def delete(self, session: SessionState, node_id: str, recursive: bool = False) -> int:
        return session.graph.delete(node_id, recursive)

    # -- LLM-backed transforms --

    def modify(
        self, session: SessionState, node_id: str, instruction: str
    ) -> tuple[VersionNode, StructuredReply]:
        return modify_node(
            session,
            node_id,
            instruction,
            self._gateway_for(session),
            self.forge,
            self.clock.now_ms(),
        )

    def merge(
        self, session: SessionState, a_id: str, b_id: str, instruction: str
    ) -> tuple[VersionNode, StructuredReply]:
        return merge_nodes(
            session,
            a_id,
            b_id,
            instruction,
            self._gateway_for(session),
            self.forge,
            self.clock.now_ms(),
        )

    def spark(
        self, session: SessionState, node_id: str, spark_id: str
    ) -> tuple[VersionNode, StructuredReply]:
        option = self.sparks.by_id(spark_id)
        return apply_spark(
            session,
            node_id,
            option,
            self._gateway_for(session),
            self.forge,
            self.clock.now_ms(),
        )

    def spark_options(self, node: VersionNode | None = None) -> list[SparkOption]:
        return self.sparks.for_node(node)


def mock_engine(clock=None, id_factory=None, **kwargs) -> Engine:
    """An engine wired entirely to the deterministic offline backend."""
    return Engine(gateway=MockGateway(), clock=clock, id_factory=id_factory, **kwargs)

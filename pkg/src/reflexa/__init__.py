"""Reflexa: a reflection-scaffolding engine for LLM-assisted creative coding.

The engine dispatches dialogue through reflection modes with escalating
secondary templates, manages a versioned sketch graph with modify/merge
operations and branch-scoped context, retrieves few-shot inspiration via
embeddings, and exposes everything through a REST API and a headless CLI.
"""

from .clock import SystemClock, TickClock
from .dispatch import (
    Decision,
    DispatchState,
    ReflectionMode,
    TemplateCatalog,
    TemplateSpec,
    load_template_catalog,
    select_template,
)
from .engine import Engine, TurnResult, mock_engine
from .errors import ReflexaError
from .gateway import (
    ChatGateway,
    EmbeddingVector,
    GatewayConfig,
    HttpGateway,
    MockGateway,
    StructuredReply,
    cosine,
    gateway_from_env,
)
from .graph import ChatTurn, ContextBundle, NodeKind, VersionGraph, VersionNode
from .inspiration import InspirationEntry, InspirationIndex, SparkCatalog, SparkOption
from .persistence import dumps_session, load_session, save_session, session_to_doc
from .prompts import EXPECTED_KEYS, PromptBundle, PromptForge, truncate_history
from .rice import RiceScore, score_rice
from .scripting import export_tree, replay_session, run_script
from .session import SessionSettings, SessionState, create_session

__version__ = "0.1.0"

__all__ = [
    "ChatGateway",
    "ChatTurn",
    "ContextBundle",
    "Decision",
    "DispatchState",
    "EXPECTED_KEYS",
    "EmbeddingVector",
    "Engine",
    "GatewayConfig",
    "HttpGateway",
    "InspirationEntry",
    "InspirationIndex",
    "MockGateway",
    "NodeKind",
    "PromptBundle",
    "PromptForge",
    "ReflectionMode",
    "ReflexaError",
    "RiceScore",
    "SessionSettings",
    "SessionState",
    "SparkCatalog",
    "SparkOption",
    "StructuredReply",
    "SystemClock",
    "TemplateCatalog",
    "TemplateSpec",
    "TickClock",
    "TurnResult",
    "VersionGraph",
    "VersionNode",
    "cosine",
    "create_session",
    "dumps_session",
    "export_tree",
    "gateway_from_env",
    "load_session",
    "load_template_catalog",
    "mock_engine",
    "replay_session",
    "run_script",
    "save_session",
    "score_rice",
    "select_template",
    "session_to_doc",
    "truncate_history",
]

"""Typed error hierarchy.

Every error carries a stable kebab-case ``code`` used verbatim on the wire
(REST error bodies) and in CLI diagnostics.
"""

from __future__ import annotations


class ReflexaError(Exception):
    """Base class for all engine errors."""

    code = "error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


# -- Session / settings --

class InvalidSettingsError(ReflexaError):
    code = "invalid-settings"


class UnknownSessionError(ReflexaError):
    code = "unknown-session"


# -- Version graph --

class UnknownNodeError(ReflexaError):
    code = "unknown-node"


class CannotDeleteRootError(ReflexaError):
    code = "cannot-delete-root"


class CannotDuplicateRootError(ReflexaError):
    code = "cannot-duplicate-root"


class HasChildrenError(ReflexaError):
    code = "has-children"


class StaleSequenceError(ReflexaError):
    code = "stale-sequence"


# -- Dispatch / prompts --

class NotInTemplateError(ReflexaError):
    code = "not-in-template"


class TemplateModeMismatchError(ReflexaError):
    code = "template-mode-mismatch"


class SameNodeError(ReflexaError):
    code = "same-node"


# -- Gateway --

class GatewayError(ReflexaError):
    """Base for failures raised while talking to (or parsing) the model."""

    code = "gateway-error"


class ProviderError(GatewayError):
    code = "provider-error"


class MalformedReplyError(GatewayError):
    code = "malformed-reply"


class MissingKeysError(GatewayError):
    code = "missing-keys"


class EmptyTextError(GatewayError):
    code = "empty-text"


class DimMismatchError(ReflexaError):
    code = "dim-mismatch"


class ZeroVectorError(ReflexaError):
    code = "zero-vector"


# -- Inspiration index / sparks --

class UnreadableFileError(ReflexaError):
    code = "unreadable-file"


class DuplicateIdError(ReflexaError):
    code = "duplicate-id"


class EmptyIndexError(ReflexaError):
    code = "empty-index"


class UnknownSparkError(ReflexaError):
    code = "unknown-spark"


# -- Persistence --

class PersistenceError(ReflexaError):
    code = "io-error"


class SchemaVersionMismatchError(PersistenceError):
    code = "schema-version-mismatch"


class CorruptFileError(PersistenceError):
    code = "corrupt-file"


# -- Service --

class CorpusMissingError(ReflexaError):
    code = "corpus-missing"


# -- Scoring / scripting --

class OutOfRangeError(ReflexaError):
    code = "out-of-range"


class WrongArityError(ReflexaError):
    code = "wrong-arity"


class ScriptParseError(ReflexaError):
    code = "script-parse-error"

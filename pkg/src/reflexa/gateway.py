"""Provider-agnostic chat/embedding gateway with strict structured output.

Every completion must come back as a single JSON object carrying the keys
the originating prompt bundle demands. The gateway parses the model text,
applies one repair pass when the first parse fails (strip code fences,
extract the outermost braced block), and retries the provider once with a
corrective instruction before giving up with a typed error. At most two
provider calls are ever made per completion.

The mock backend is a pure function of the request payload: replies and
embeddings are derived from stable content hashes, so offline runs replay
byte-identically.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import random
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

import httpx

from .errors import (
    DimMismatchError,
    EmptyTextError,
    MalformedReplyError,
    MissingKeysError,
    ProviderError,
    ZeroVectorError,
)

if TYPE_CHECKING:
    from .prompts import PromptBundle

DEFAULT_CHAT_MODEL = "gpt-4o"
DEFAULT_EMBED_MODEL = "text-embedding-ada-002"
DEFAULT_API_BASE = "https://api.openai.com/v1"
MOCK_EMBED_DIM = 64

RETRY_INSTRUCTION = (
    "Your previous reply was not a single valid JSON object with the required "
    "keys ({keys}). Respond again with only that JSON object and nothing else."
)


@dataclass(frozen=True)
class EmbeddingVector:
    """Fixed-length embedding; values are always finite."""

    values: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.values)


@dataclass
class StructuredReply:
    """A validated per-mode structured model reply."""

    fields: dict[str, str]
    raw: str
    repaired: bool
    call_kind: str


@dataclass
class GatewayConfig:
    api_key: str = ""
    api_base: str = DEFAULT_API_BASE
    chat_model: str = DEFAULT_CHAT_MODEL
    embed_model: str = DEFAULT_EMBED_MODEL
    mock: bool = False
    embed_dim: int = MOCK_EMBED_DIM
    temperature: float = 0.0
    timeout: float = 60.0

    @classmethod
    def from_env(cls, env: dict[str, str] | None = None) -> "GatewayConfig":
        env = os.environ if env is None else env
        return cls(
            api_key=env.get("REFLEXA_API_KEY", ""),
            api_base=env.get("REFLEXA_API_BASE", DEFAULT_API_BASE),
            chat_model=env.get("REFLEXA_CHAT_MODEL", DEFAULT_CHAT_MODEL),
            embed_model=env.get("REFLEXA_EMBED_MODEL", DEFAULT_EMBED_MODEL),
            mock=env.get("REFLEXA_MOCK", "") == "1",
        )


# -- Vector arithmetic --

def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity of two same-dimension, nonzero vectors."""
    if a.dim != b.dim:
        raise DimMismatchError(f"dims differ: {a.dim} vs {b.dim}")
    dot = sum(x * y for x, y in zip(a.values, b.values))
    na = math.sqrt(sum(x * x for x in a.values))
    nb = math.sqrt(sum(y * y for y in b.values))
    if na == 0.0 or nb == 0.0:
        raise ZeroVectorError("cosine is undefined for a zero vector")
    return dot / (na * nb)


# -- Structured-output parsing --

def _strip_fences(text: str) -> str:
    lines = [line for line in text.splitlines() if not line.strip().startswith("```")]
    return "\n".join(lines)

def _outermost_braces(text: str) -> str | None:
    start = text.find("{")
    end = text.rfind("}")
    if start == -1 or end <= start:
        return None
    return text[start : end + 1]

def parse_structured(text: str) -> tuple[dict[str, str], bool] | None:
    """Parse model text into a string-valued dict.

    Returns ``(fields, repaired)`` or None when no object can be recovered.
    The repair pass strips code fences and cuts the outermost braced block.
    Non-string field values are kept, serialized compactly.
    """
    for repaired, candidate in enumerate([text, _outermost_braces(_strip_fences(text))]):
        if candidate is None:
            continue
        try:
            obj = json.loads(candidate)
        except (json.JSONDecodeError, RecursionError):
            continue
        if isinstance(obj, dict):
            fields = {
                str(k): v if isinstance(v, str) else json.dumps(v, ensure_ascii=False)
                for k, v in obj.items()
            }
            return fields, bool(repaired)
    return None

def missing_keys(fields: dict[str, str], expected: tuple[str, ...]) -> list[str]:
    """Required keys absent or, for ``code``, present but blank."""
    missing = [k for k in expected if k not in fields]
    if "code" in expected and not fields.get("code", "").strip():
        if "code" not in missing:
            missing.append("code")
    return missing


ChatFn = Callable[[str, str, tuple[str, ...]], str]
"""Provider hook: (system, user, expected_keys) -> raw model text.

Expected keys are advisory for the provider (the mock derives its reply from
them; HTTP providers may ignore them).
"""


class ChatGateway:
    """Chat-completion + embedding client over pluggable provider callables.

    ``chat_fn`` returns raw model text; ``embed_fn(text)`` raw vector values.
    The gateway keeps no per-call state, so one instance may serve many
    sessions concurrently.
    """

    def __init__(
        self,
        chat_fn: ChatFn,
        embed_fn: Callable[[str], list[float]],
        config: GatewayConfig | None = None,
    ):
        self.chat_fn = chat_fn
        self.embed_fn = embed_fn
        self.config = config or GatewayConfig()

    @property
    def is_mock(self) -> bool:
        return self.config.mock

    def complete(self, bundle: "PromptBundle") -> StructuredReply:
        """Run one completion and enforce the bundle's reply schema.

        One provider call, one repair pass, at most one corrective retry.
        ``repaired`` is set whenever the accepted reply did not parse cleanly
        on the first attempt.
        """
        expected = bundle.expected_keys
        user = bundle.user_message()
        text = self.chat_fn(bundle.system_prompt, user, expected)
        parsed = parse_structured(text)
        if parsed is not None and not missing_keys(parsed[0], expected):
            return StructuredReply(parsed[0], text, parsed[1], bundle.call_kind)

        correction = RETRY_INSTRUCTION.format(keys=", ".join(expected))
        text = self.chat_fn(bundle.system_prompt, f"{user}\n\n{correction}", expected)
        parsed = parse_structured(text)
        if parsed is None:
            raise MalformedReplyError("model reply is not a JSON object after retry")
        fields, _ = parsed
        absent = missing_keys(fields, expected)
        if absent:
            raise MissingKeysError(f"reply lacks required keys: {', '.join(absent)}")
        return StructuredReply(fields, text, True, bundle.call_kind)

    def embed(self, text: str) -> EmbeddingVector:
        if not text:
            raise EmptyTextError("cannot embed empty text")
        values = tuple(float(v) for v in self.embed_fn(text))
        if not values or any(not math.isfinite(v) for v in values):
            raise ProviderError("embedding is empty or non-finite")
        return EmbeddingVector(values)


# -- Deterministic mock backend --

def _digest(*parts: str) -> str:
    h = hashlib.sha256()
    for part in parts:
        h.update(part.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()

def _mock_sketch(digest: str) -> str:
    b = int(digest[0:2], 16)
    r, g, bl = int(digest[2:4], 16), int(digest[4:6], 16), int(digest[6:8], 16)
    speed = 1 + int(digest[8:10], 16) % 9
    size = 40 + int(digest[10:12], 16) % 120
    return (
        "function setup() {\n"
        "  createCanvas(400, 400);\n"
        "  noStroke();\n"
        "}\n"
        "function draw() {\n"
        f"  background({b % 64});\n"
        f"  fill({r}, {g}, {bl});\n"
        f"  const x = 200 + 120 * sin(frameCount * 0.0{speed});\n"
        f"  circle(x, 200, {size});\n"
        "}\n"
    )

_MOCK_LINES = {
    "rationale": "- Mock rationale: tied the change to the stated intent ({tag}).",
    "summary": "- Mock summary of the modification ({tag}).",
    "reflection": "What would change if you pushed this one step further? ({tag})",
    "exploration": "- Mock exploration of the connections at play ({tag}).",
    "advice": "- Mock suggestion A ({tag}).\n- Mock suggestion B ({tag}).",
}

def mock_chat_text(system: str, user: str, expected_keys: tuple[str, ...]) -> str:
    """Deterministic JSON reply keyed by a hash of the request payload."""
    digest = _digest(system, user)
    tag = digest[:12]
    fields = {}
    for key in expected_keys:
        if key == "code":
            fields[key] = _mock_sketch(digest)
        else:
            fields[key] = _MOCK_LINES.get(key, "Mock {key} ({tag}).").format(
                key=key, tag=tag
            )
    return json.dumps(fields, ensure_ascii=False, indent=2)

def mock_embed_values(text: str, dim: int = MOCK_EMBED_DIM) -> list[float]:
    """Unit vector drawn from an RNG seeded by a stable text hash."""
    seed = int(_digest(text)[:16], 16)
    rng = random.Random(seed)
    values = [rng.random() * 2.0 - 1.0 for _ in range(dim)]
    norm = math.sqrt(sum(v * v for v in values))
    return [v / norm for v in values]


class MockGateway(ChatGateway):
    """Fully offline gateway; a pure function of its inputs."""

    def __init__(self, config: GatewayConfig | None = None):
        config = config or GatewayConfig(mock=True)
        config.mock = True
        super().__init__(self._chat, self._embed, config)

    def _chat(self, system: str, user: str, expected_keys: tuple[str, ...]) -> str:
        return mock_chat_text(system, user, expected_keys)

    def _embed(self, text: str) -> list[float]:
        return mock_embed_values(text, self.config.embed_dim)


# -- OpenAI-compatible HTTP backend --

class HttpGateway(ChatGateway):
    """Chat/embedding over an OpenAI-compatible HTTP API."""

    def __init__(self, config: GatewayConfig):
        super().__init__(self._chat, self._embed, config)
        self._client = httpx.Client(
            base_url=config.api_base,
            headers={"Authorization": f"Bearer {config.api_key}"},
            timeout=config.timeout,
        )

    def _post(self, path: str, payload: dict) -> dict:
        try:
            response = self._client.post(path, json=payload)
            response.raise_for_status()
            return response.json()
        except httpx.HTTPError as exc:
            raise ProviderError(f"provider call failed: {exc}") from exc

    def _chat(self, system: str, user: str, expected_keys: tuple[str, ...]) -> str:
        data = self._post(
            "/chat/completions",
            {
                "model": self.config.chat_model,
                "temperature": self.config.temperature,
                "messages": [
                    {"role": "system", "content": system},
                    {"role": "user", "content": user},
                ],
            },
        )
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError("unexpected chat response shape") from exc

    def _embed(self, text: str) -> list[float]:
        data = self._post(
            "/embeddings", {"model": self.config.embed_model, "input": text}
        )
        try:
            return data["data"][0]["embedding"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError("unexpected embedding response shape") from exc


def gateway_from_config(config: GatewayConfig) -> ChatGateway:
    return MockGateway(config) if config.mock else HttpGateway(config)


def gateway_from_env() -> ChatGateway:
    return gateway_from_config(GatewayConfig.from_env())

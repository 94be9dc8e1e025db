"""Prompt assembly: per-call system prompts, context blocks, reply schemas.

Prompt text ships as plain UTF-8 data files (one per mode and per node
operation) so wording can be edited without touching code; their checksums
are logged at load for reproducibility. Builders are pure functions of
their inputs: identical inputs yield byte-identical bundles, which the
deterministic replay machinery relies on.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from importlib import resources

from .dispatch import ReflectionMode, TemplateSpec
from .errors import SameNodeError, TemplateModeMismatchError
from .graph import ChatTurn, ContextBundle, VersionNode

logger = logging.getLogger("reflexa.prompts")

EXAMPLES_SLOT = "{{examples}}"

# Required reply keys per call kind, in reply order.
EXPECTED_KEYS: dict[str, tuple[str, ...]] = {
    "general": ("code", "rationale", "summary", "reflection"),
    "r1": ("code", "rationale", "reflection"),
    "r2": ("code", "exploration", "reflection"),
    "r3": ("code", "reflection", "advice"),
    "modify": ("code", "rationale", "reflection"),
    "merge": ("code", "rationale", "reflection"),
}

DEFAULT_HISTORY_TURNS = 12


@dataclass(frozen=True)
class PromptBundle:
    """The exact payload for one model call, plus its reply contract."""

    system_prompt: str
    context_block: str
    examples_block: str
    user_prompt: str
    expected_keys: tuple[str, ...]
    call_kind: str

    def user_message(self) -> str:
        if self.context_block:
            return f"{self.context_block}\n\n{self.user_prompt}"
        return self.user_prompt


def truncate_history(turns: list[ChatTurn], limit: int) -> list[ChatTurn]:
    """Keep only the most recent ``limit`` turns, order preserved."""
    if limit < 1:
        raise ValueError("history limit must be at least 1")
    return turns[-limit:]


def render_history(turns: list[ChatTurn]) -> str:
    lines = []
    for turn in turns:
        lines.append(f"[{turn.seq}] user ({turn.mode.value}): {turn.user_prompt}")
        reply_bits = " | ".join(
            f"{key}: {value}"
            for key, value in turn.reply.fields.items()
            if key != "code"
        )
        lines.append(f"[{turn.seq}] assistant: {reply_bits}")
    return "\n".join(lines)


def render_examples(entries: list) -> str:
    blocks = [
        f"Example: {e.title}\n{e.description}\n```javascript\n{e.code}\n```"
        for e in entries
    ]
    return "\n\n".join(blocks)


def _code_section(label: str, code: str) -> str:
    return f"{label}:\n```javascript\n{code}\n```"


class PromptForge:
    """Loads the prompt files once and assembles bundles on demand."""

    PROMPT_FILES = ("general", "r1", "r2", "r3", "modify", "merge")

    def __init__(self):
        self._texts: dict[str, str] = {}
        base = resources.files("reflexa").joinpath("data/prompts")
        for name in self.PROMPT_FILES:
            text = base.joinpath(f"{name}.txt").read_text("utf-8")
            self._texts[name] = text
            digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
            logger.info("loaded prompt %s (sha256=%s)", name, digest[:16])

    def prompt_text(self, name: str) -> str:
        return self._texts[name]

    def build_mode_prompt(
        self,
        mode: ReflectionMode,
        template: TemplateSpec | None,
        context: ContextBundle,
        examples: list,
        user_prompt: str,
        history_limit: int = DEFAULT_HISTORY_TURNS,
    ) -> PromptBundle:
        """Assemble a dialogue-turn bundle for a mode, templated or plain.

        The secondary template's prompt, when present, is appended after the
        base mode prompt as an overriding task section. Only general-mode
        bundles carry retrieved examples (the base prompt's examples slot).
        """
        if template is not None and template.mode is not mode:
            raise TemplateModeMismatchError(
                f"template {template.id} belongs to {template.mode.value}, not {mode.value}"
            )
        system = self._texts[mode.value]
        examples_block = ""
        if mode is ReflectionMode.GENERAL:
            examples_block = render_examples(examples)
            system = system.replace(EXAMPLES_SLOT, examples_block)
        if template is not None:
            system = (
                f"{system}\n\n"
                f"## Secondary Reflection Template: {template.name}\n"
                f"{template.system_prompt}"
            )
        history = truncate_history(context.history, history_limit)
        context_block = _code_section("Current code", context.code)
        if history:
            context_block += "\n\nRecent dialogue:\n" + render_history(history)
        call_kind = "template" if template is not None else mode.value
        return PromptBundle(
            system_prompt=system,
            context_block=context_block,
            examples_block=examples_block,
            user_prompt=user_prompt,
            expected_keys=EXPECTED_KEYS[mode.value],
            call_kind=call_kind,
        )

    def build_modify_prompt(self, base: VersionNode, instruction: str) -> PromptBundle:
        """Bundle for reworking one node's code around an inspiration text."""
        return PromptBundle(
            system_prompt=self._texts["modify"],
            context_block=_code_section("Base code", base.code),
            examples_block="",
            user_prompt=f"Code inspiration example:\n{instruction}",
            expected_keys=EXPECTED_KEYS["modify"],
            call_kind="modify",
        )

    def build_merge_prompt(
        self, a: VersionNode, b: VersionNode, instruction: str
    ) -> PromptBundle:
        """Bundle fusing two nodes; argument order fixes the A/B labels."""
        if a.id == b.id:
            raise SameNodeError("cannot merge a node with itself")
        context_block = (
            _code_section("Version A", a.code)
            + "\n\n"
            + _code_section("Version B", b.code)
        )
        return PromptBundle(
            system_prompt=self._texts["merge"],
            context_block=context_block,
            examples_block="",
            user_prompt=f"Fusion instruction:\n{instruction}",
            expected_keys=EXPECTED_KEYS["merge"],
            call_kind="merge",
        )

"""Reflection-mode dispatch: escalation tracking and template selection.

Dialogue runs in one of four modes. The three reflection modes (r1, r2, r3)
escalate: when a user stays in the same mode for a second consecutive turn,
that turn is governed by one of seven curated secondary templates. The
template is chosen by keyword match against the prompt when the user named
an option explicitly, otherwise by embedding similarity over the template
descriptions. After one templated turn the escalation counter resets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Callable

from .errors import NotInTemplateError
from .gateway import EmbeddingVector, cosine


class ReflectionMode(str, Enum):
    GENERAL = "general"
    R1 = "r1"
    R2 = "r2"
    R3 = "r3"

    @classmethod
    def parse(cls, value: str) -> "ReflectionMode":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise ValueError(f"unknown reflection mode {value!r}") from None


REFLECTIVE_MODES = (ReflectionMode.R1, ReflectionMode.R2, ReflectionMode.R3)


class Decision(str, Enum):
    PLAIN = "plain"
    TEMPLATE_ELIGIBLE = "template_eligible"


@dataclass(frozen=True)
class TemplateSpec:
    """One secondary reflection template (catalog entry)."""

    id: str
    mode: ReflectionMode
    name: str
    keywords: tuple[str, ...]
    description: str
    system_prompt: str


@dataclass
class DispatchState:
    """Consecutive-mode escalation counter for one session."""

    last_mode: ReflectionMode | None = None
    run_length: int = 0
    in_template: str | None = None

    def copy(self) -> "DispatchState":
        return DispatchState(self.last_mode, self.run_length, self.in_template)

    def observe(self, mode: ReflectionMode) -> Decision:
        """Classify the incoming turn and advance the run counter.

        The second consecutive turn in the same reflection mode is
        template-eligible; the general mode never escalates.
        """
        eligible = (
            mode in REFLECTIVE_MODES
            and mode is self.last_mode
            and self.run_length >= 1
        )
        if mode is self.last_mode:
            self.run_length += 1
        else:
            self.last_mode = mode
            self.run_length = 1
        return Decision.TEMPLATE_ELIGIBLE if eligible else Decision.PLAIN

    def exit_template(self) -> None:
        """Leave the secondary template and restart the escalation run."""
        if self.in_template is None:
            raise NotInTemplateError("no secondary template is active")
        self.in_template = None
        self.run_length = 0
        self.last_mode = None


class TemplateCatalog:
    """The ordered catalog of secondary templates."""

    def __init__(self, templates: list[TemplateSpec]):
        self.templates = list(templates)
        self._by_id = {t.id: t for t in templates}

    def __len__(self) -> int:
        return len(self.templates)

    def __iter__(self):
        return iter(self.templates)

    def by_id(self, template_id: str) -> TemplateSpec:
        try:
            return self._by_id[template_id]
        except KeyError:
            raise KeyError(f"unknown template id {template_id!r}") from None

    def for_mode(self, mode: ReflectionMode) -> list[TemplateSpec]:
        return [t for t in self.templates if t.mode is mode]


def load_template_catalog() -> TemplateCatalog:
    """Load the shipped template catalog data file."""
    raw = resources.files("reflexa").joinpath("data/templates.json").read_text("utf-8")
    entries = json.loads(raw)
    templates = [
        TemplateSpec(
            id=e["id"],
            mode=ReflectionMode(e["mode"]),
            name=e["name"],
            keywords=tuple(e["keywords"]),
            description=e["description"],
            system_prompt=e["system_prompt"],
        )
        for e in entries
    ]
    return TemplateCatalog(templates)


def select_template(
    catalog: TemplateCatalog,
    mode: ReflectionMode,
    user_prompt: str,
    embed: Callable[[str], EmbeddingVector],
) -> TemplateSpec:
    """Pick the secondary template that governs an eligible turn.

    Keyword path first: if the case-folded prompt contains any keyword of the
    mode's templates, the earliest matching catalog entry wins and the
    embedder is never consulted. Otherwise the semantic path picks the
    template whose description embeds closest to the prompt (ties keep
    catalog order).
    """
    candidates = catalog.for_mode(mode)
    if not candidates:
        raise ValueError(f"no templates exist for mode {mode.value}")
    folded = user_prompt.casefold()
    for template in candidates:
        if any(keyword in folded for keyword in template.keywords):
            return template
    query = embed(user_prompt)
    best = candidates[0]
    best_score = cosine(query, embed(best.description))
    for template in candidates[1:]:
        score = cosine(query, embed(template.description))
        if score > best_score:
            best, best_score = template, score
    return best

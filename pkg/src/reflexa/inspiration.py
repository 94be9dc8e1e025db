"""Inspiration corpus index and the Spark quick-transform catalog.

The corpus is small (tens of entries), so retrieval is an exact full scan
over cached embeddings. Embeddings can be persisted to a startup cache
keyed by a checksum of the corpus content and the embedding configuration,
which spares real providers a re-embed on every boot.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable

from .errors import DuplicateIdError, EmptyIndexError, UnknownSparkError, UnreadableFileError
from .gateway import EmbeddingVector, cosine

ENTRY_FIELDS = ("id", "title", "description", "code", "source")


@dataclass(frozen=True)
class InspirationEntry:
    id: str
    title: str
    description: str
    code: str
    source: str


@dataclass(frozen=True)
class SparkOption:
    """A pre-defined transformation suggestion applied via modify."""

    id: str
    label: str
    reference: str
    preview_asset: str


def shipped_corpus_dir() -> Path:
    return Path(str(resources.files("reflexa").joinpath("data/corpus")))


def load_spark_catalog() -> list[SparkOption]:
    raw = resources.files("reflexa").joinpath("data/sparks.json").read_text("utf-8")
    return [SparkOption(**entry) for entry in json.loads(raw)]


def _read_entry(path: Path) -> InspirationEntry:
    try:
        doc = json.loads(path.read_text("utf-8"))
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise UnreadableFileError(f"cannot read corpus entry {path.name}: {exc}") from exc
    if not isinstance(doc, dict) or any(f not in doc for f in ENTRY_FIELDS):
        raise UnreadableFileError(f"corpus entry {path.name} lacks required fields")
    if not str(doc["description"]).strip():
        raise UnreadableFileError(f"corpus entry {path.name} has an empty description")
    return InspirationEntry(**{f: str(doc[f]) for f in ENTRY_FIELDS})


class InspirationIndex:
    """Embedded corpus entries plus exact top-k retrieval."""

    def __init__(self, embed: Callable[[str], EmbeddingVector]):
        self._embed = embed
        self._entries: dict[str, InspirationEntry] = {}
        self._vectors: dict[str, EmbeddingVector] = {}

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def entries(self) -> list[InspirationEntry]:
        return list(self._entries.values())

    def ingest(self, dir_path: str | Path, cache_dir: str | Path | None = None) -> int:
        """Embed every ``*.json`` entry file in a directory.

        Re-ingesting the same directory is idempotent: entries replace by id.
        Two files carrying the same id in one pass is an error. When a cache
        directory is given, vectors are reused if the corpus checksum and
        embedding signature match, and refreshed otherwise.
        """
        dir_path = Path(dir_path)
        files = sorted(dir_path.glob("*.json"))
        entries = []
        seen: set[str] = set()
        checksum = hashlib.sha256()
        for path in files:
            entry = _read_entry(path)
            if entry.id in seen:
                raise DuplicateIdError(f"corpus id {entry.id!r} appears twice")
            seen.add(entry.id)
            entries.append(entry)
            checksum.update(path.read_bytes())

        cached = self._load_cache(cache_dir, checksum.hexdigest()) if cache_dir else None
        for entry in entries:
            if cached is not None and entry.id in cached:
                vector = EmbeddingVector(tuple(cached[entry.id]))
            else:
                vector = self._embed(entry.description)
            self._entries[entry.id] = entry
            self._vectors[entry.id] = vector
        if cache_dir and cached is None and entries:
            self._write_cache(cache_dir, checksum.hexdigest())
        return len(entries)

    def retrieve(self, query: str, k: int) -> list[InspirationEntry]:
        """Top-k entries by cosine similarity to the query, ties by id."""
        if not self._entries:
            raise EmptyIndexError("the inspiration index is empty")
        if k < 1:
            raise ValueError("k must be at least 1")
        query_vec = self._embed(query)
        ranked = sorted(
            self._entries.values(),
            key=lambda e: (-cosine(query_vec, self._vectors[e.id]), e.id),
        )
        return ranked[:k]

    # -- Embedding cache --

    def _cache_path(self, cache_dir: str | Path) -> Path:
        return Path(cache_dir) / "inspiration-embeddings.json"

    def _load_cache(self, cache_dir: str | Path, checksum: str) -> dict | None:
        path = self._cache_path(cache_dir)
        if not path.exists():
            return None
        try:
            doc = json.loads(path.read_text("utf-8"))
        except (OSError, json.JSONDecodeError):
            return None
        if doc.get("checksum") != checksum:
            return None
        return doc.get("vectors", {})

    def _write_cache(self, cache_dir: str | Path, checksum: str) -> None:
        path = self._cache_path(cache_dir)
        path.parent.mkdir(parents=True, exist_ok=True)
        doc = {
            "checksum": checksum,
            "vectors": {eid: list(vec.values) for eid, vec in self._vectors.items()},
        }
        path.write_text(json.dumps(doc), encoding="utf-8")


class SparkCatalog:
    """The static list of Spark options, stable in order."""

    def __init__(self, options: list[SparkOption] | None = None):
        self.options = list(options) if options is not None else load_spark_catalog()
        self._by_id = {o.id: o for o in self.options}

    def __len__(self) -> int:
        return len(self.options)

    def by_id(self, spark_id: str) -> SparkOption:
        try:
            return self._by_id[spark_id]
        except KeyError:
            raise UnknownSparkError(f"no spark with id {spark_id!r}") from None

    def for_node(self, node=None) -> list[SparkOption]:
        """Options offered for a node; currently the full static catalog."""
        return list(self.options)

"""Corpus-to-embeddings exporter.

Reads a corpus in the softcoref JSONL schema and writes the embedding
interchange file the context-aware resolver consumes: one header record,
then one raw (un-normalized) vector per unique normalized mention form
and one per "doc:"+doc_id of every document containing mentions. The
resolver owns unit normalization, so vectors are emitted exactly as the
encoder produced them.

This package deliberately does not import the core toolkit; the corpus
schema, the normalization rule, and the document-context rule are
duplicated here and pinned by cross-component fixture tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

__all__ = [
    "DEFAULT_MODEL",
    "DOC_KEY_PREFIX",
    "MAX_CONTEXT_SENTENCES",
    "SidecarConfig",
    "SidecarError",
    "SentenceEncoder",
    "normalize_form",
    "read_simple_corpus",
    "doc_contexts",
    "embed_corpus",
]

DEFAULT_MODEL = "sentence-transformers/all-MiniLM-L6-v2"
DOC_KEY_PREFIX = "doc:"
MAX_CONTEXT_SENTENCES = 10


class SidecarError(Exception):
    """Unreadable corpus, malformed records, or encoder failures."""


@dataclass(frozen=True)
class SidecarConfig:
    corpus_path: Path
    out_path: Path
    model_id: str = DEFAULT_MODEL
    batch_size: int = 64


def normalize_form(text: str) -> str:
    """Case-fold, trim, collapse whitespace runs; must match the core rule."""
    return " ".join(text.casefold().split())


def read_simple_corpus(path: str | Path) -> tuple[list[tuple[str, str, str]], list[dict]]:
    """Sentences as (doc_id, sent_id, text) in file order, plus mention dicts."""
    sentences: list[tuple[str, str, str]] = []
    mentions: list[dict] = []
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise SidecarError(f"cannot read corpus {path}: {exc}") from exc
    with handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SidecarError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
            kind = record.get("kind")
            if kind == "sentence":
                try:
                    sentences.append((record["doc_id"], record["sent_id"], record["text"]))
                except KeyError as exc:
                    raise SidecarError(f"{path}:{lineno}: sentence record missing {exc}") from exc
            elif kind == "mention":
                if "doc_id" not in record or "sent_id" not in record or "text" not in record:
                    raise SidecarError(f"{path}:{lineno}: mention record missing fields")
                mentions.append(record)
            else:
                raise SidecarError(f"{path}:{lineno}: unknown record kind {kind!r}")
    return sentences, mentions


def doc_contexts(
    sentences: Sequence[tuple[str, str, str]],
    mentions: Sequence[dict],
    max_sentences: int = MAX_CONTEXT_SENTENCES,
) -> dict[str, str]:
    """Context string per document with at least one mention.

    Same rule as the resolver: the first ``max_sentences`` distinct
    mention-bearing sentence texts in document order, joined by single
    spaces.
    """
    bearing = {(m["doc_id"], m["sent_id"]) for m in mentions}
    mention_docs = {m["doc_id"] for m in mentions}
    picked: dict[str, list[str]] = {doc: [] for doc in mention_docs}
    seen: dict[str, set[str]] = {doc: set() for doc in mention_docs}
    for doc_id, sent_id, text in sentences:
        if doc_id not in picked or (doc_id, sent_id) not in bearing:
            continue
        if text in seen[doc_id] or len(picked[doc_id]) >= max_sentences:
            continue
        picked[doc_id].append(text)
        seen[doc_id].add(text)
    return {doc: " ".join(texts) for doc, texts in picked.items()}


class SentenceEncoder:
    """Pretrained sentence-transformer behind the tiny encoder protocol
    (``dim`` plus ``encode``). Loading failures surface as SidecarError."""

    def __init__(self, model_id: str = DEFAULT_MODEL, batch_size: int = 64):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise SidecarError(f"sentence-transformers is not installed: {exc}") from exc
        try:
            self._model = SentenceTransformer(model_id)
        except Exception as exc:
            raise SidecarError(f"cannot load encoder {model_id!r}: {exc}") from exc
        self.model_id = model_id
        self.batch_size = batch_size
        self.dim = int(self._model.get_sentence_embedding_dimension())

    def encode(self, texts: Sequence[str]) -> list[list[float]]:
        vectors = self._model.encode(
            list(texts),
            batch_size=self.batch_size,
            convert_to_numpy=True,
            normalize_embeddings=False,
            show_progress_bar=False,
        )
        return [[float(x) for x in row] for row in vectors]


def embed_corpus(config: SidecarConfig, encoder=None) -> dict[str, int]:
    """Write the interchange file; returns {"forms": n, "docs": n}.

    ``encoder`` may be anything with ``dim``, ``model_id``, and
    ``encode(texts)``; by default the configured sentence-transformer is
    loaded. The output is written in one pass after all batches finish,
    records sorted by key, floats serialized via repr (>= 9 significant
    digits, so round-trip error stays below the 1e-6 interchange bound).
    """
    sentences, mentions = read_simple_corpus(config.corpus_path)
    if encoder is None:
        encoder = SentenceEncoder(config.model_id, config.batch_size)

    forms = sorted({normalize_form(m["text"]) for m in mentions})
    contexts = doc_contexts(sentences, mentions)
    keyed_texts = [(form, form) for form in forms]
    keyed_texts += [(DOC_KEY_PREFIX + doc, contexts[doc]) for doc in sorted(contexts)]
    keyed_texts.sort()

    vectors = encoder.encode([text for _, text in keyed_texts]) if keyed_texts else []
    for (key, _), vector in zip(keyed_texts, vectors):
        if len(vector) != encoder.dim:
            raise SidecarError(
                f"encoder returned {len(vector)} components for {key!r}, expected {encoder.dim}"
            )

    header = {"kind": "header", "dim": encoder.dim, "model": getattr(encoder, "model_id", "unknown")}
    try:
        out = open(config.out_path, "w", encoding="utf-8")
    except OSError as exc:
        raise SidecarError(f"cannot write {config.out_path}: {exc}") from exc
    with out:
        out.write(json.dumps(header, ensure_ascii=False, separators=(",", ":")) + "\n")
        for (key, _), vector in zip(keyed_texts, vectors):
            record = {"kind": "vector", "key": key, "vector": vector}
            out.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n")
    return {"forms": len(forms), "docs": len(contexts)}

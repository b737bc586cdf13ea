"""Domain types, corpus validation, and the corpus/partition file formats.

A corpus is a flat collection of sentences and mention spans; a partition
assigns every mention to exactly one cluster. All types are immutable
after construction and safe to share across workers. Character offsets
are Unicode scalar-value offsets into the owning sentence string, never
byte offsets.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .errors import FormatError, MissingGoldError

__all__ = [
    "Mention",
    "SentenceRecord",
    "Corpus",
    "Partition",
    "Violation",
    "validate_corpus",
    "gold_partition",
    "partition_stats",
    "read_corpus",
    "write_corpus",
    "read_partition",
    "write_partition",
]


@dataclass(frozen=True)
class SentenceRecord:
    """One sentence of one document; (doc_id, sent_id) is its key."""

    doc_id: str
    sent_id: str
    text: str

    @property
    def key(self) -> tuple[str, str]:
        return (self.doc_id, self.sent_id)


@dataclass(frozen=True)
class Mention:
    """An annotated span naming a software entity inside one sentence.

    start_char is inclusive, end_char exclusive; both index Unicode scalar
    values of the owning sentence text. gold_cluster is the annotated
    coreference label, present on all mentions of a corpus or on none.
    """

    mention_id: str
    doc_id: str
    sent_id: str
    text: str
    start_char: int
    end_char: int
    gold_cluster: Optional[str] = None

    @property
    def sentence_key(self) -> tuple[str, str]:
        return (self.doc_id, self.sent_id)


@dataclass(frozen=True)
class Corpus:
    """Sentences plus mentions; the unit of resolution and scoring."""

    sentences: tuple[SentenceRecord, ...]
    mentions: tuple[Mention, ...]

    def __init__(self, sentences: Iterable[SentenceRecord], mentions: Iterable[Mention]):
        object.__setattr__(self, "sentences", tuple(sentences))
        object.__setattr__(self, "mentions", tuple(mentions))

    def sentence_index(self) -> dict[tuple[str, str], SentenceRecord]:
        """Map (doc_id, sent_id) to its record; last record wins on duplicates."""
        return {s.key: s for s in self.sentences}

    def has_gold(self) -> bool:
        """True when every mention carries a gold label (vacuously on zero mentions)."""
        return all(m.gold_cluster is not None for m in self.mentions)


@dataclass(frozen=True)
class Partition:
    """Total assignment of mention_ids to opaque string cluster labels."""

    assignment: dict[str, str]

    def as_clusters(self) -> dict[str, list[str]]:
        """Label -> lexicographically sorted member mention_ids."""
        clusters: dict[str, list[str]] = defaultdict(list)
        for mention_id, label in self.assignment.items():
            clusters[label].append(mention_id)
        return {label: sorted(ids) for label, ids in clusters.items()}

    def induced_sets(self) -> frozenset[frozenset[str]]:
        """The label-free set partition, for equality checks across labelings."""
        return frozenset(frozenset(ids) for ids in self.as_clusters().values())

    def __len__(self) -> int:
        return len(self.assignment)


@dataclass(frozen=True)
class Violation:
    """One corpus-invariant violation; violations are data, not failures."""

    kind: str
    subject: str
    detail: str


def validate_corpus(corpus: Corpus) -> list[Violation]:
    """Report every invariant violation; an empty list means the corpus is valid.

    Checked invariants: unique sentence keys, unique mention_ids, every
    mention resolving to a stored sentence, span offsets in range, span
    text equal to the sentence slice, and all-or-none gold labeling.
    Idempotent and side-effect free.
    """
    violations: list[Violation] = []

    sentence_counts = Counter(s.key for s in corpus.sentences)
    for key, count in sorted(sentence_counts.items()):
        if count > 1:
            violations.append(
                Violation("duplicate_sentence", f"{key[0]}/{key[1]}", f"sentence key appears {count} times")
            )

    mention_counts = Counter(m.mention_id for m in corpus.mentions)
    for mention_id, count in sorted(mention_counts.items()):
        if count > 1:
            violations.append(
                Violation("duplicate_mention_id", mention_id, f"mention_id appears {count} times")
            )

    index = corpus.sentence_index()
    for m in corpus.mentions:
        sentence = index.get(m.sentence_key)
        if sentence is None:
            violations.append(
                Violation("unresolved_sentence", m.mention_id, f"no sentence {m.doc_id}/{m.sent_id}")
            )
            continue
        n = len(sentence.text)
        if not (0 <= m.start_char < m.end_char <= n):
            violations.append(
                Violation(
                    "span_out_of_range",
                    m.mention_id,
                    f"span [{m.start_char},{m.end_char}) outside sentence of length {n}",
                )
            )
            continue
        if sentence.text[m.start_char : m.end_char] != m.text:
            violations.append(
                Violation(
                    "span_mismatch",
                    m.mention_id,
                    f"text {m.text!r} != sentence slice {sentence.text[m.start_char:m.end_char]!r}",
                )
            )

    with_gold = sum(1 for m in corpus.mentions if m.gold_cluster is not None)
    if 0 < with_gold < len(corpus.mentions):
        violations.append(
            Violation(
                "mixed_gold",
                "corpus",
                f"{with_gold} of {len(corpus.mentions)} mentions carry gold_cluster",
            )
        )

    return violations


def gold_partition(corpus: Corpus) -> Partition:
    """The partition induced by gold labels.

    Raises MissingGoldError if any mention lacks gold_cluster.
    """
    assignment: dict[str, str] = {}
    for m in corpus.mentions:
        if m.gold_cluster is None:
            raise MissingGoldError(f"mention {m.mention_id} has no gold_cluster")
        assignment[m.mention_id] = m.gold_cluster
    return Partition(assignment)


def partition_stats(partition: Partition) -> tuple[int, dict[int, int]]:
    """Cluster count and a size histogram (size -> number of clusters)."""
    sizes = Counter(partition.assignment.values())
    histogram = Counter(sizes.values())
    return len(sizes), dict(histogram)


# ---------------------------------------------------------------------------
# Corpus file format: JSONL, one record per line, discriminated by "kind".
# ---------------------------------------------------------------------------

_SENTENCE_FIELDS = ("doc_id", "sent_id", "text")
_MENTION_FIELDS = ("mention_id", "doc_id", "sent_id", "text", "start_char", "end_char")


def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def corpus_to_lines(corpus: Corpus) -> list[str]:
    """Serialize in stored order: sentences first, then mentions."""
    lines = []
    for s in corpus.sentences:
        lines.append(_dump({"kind": "sentence", "doc_id": s.doc_id, "sent_id": s.sent_id, "text": s.text}))
    for m in corpus.mentions:
        record = {
            "kind": "mention",
            "mention_id": m.mention_id,
            "doc_id": m.doc_id,
            "sent_id": m.sent_id,
            "text": m.text,
            "start_char": m.start_char,
            "end_char": m.end_char,
        }
        if m.gold_cluster is not None:
            record["gold_cluster"] = m.gold_cluster
        lines.append(_dump(record))
    return lines


def corpus_from_lines(lines: Iterable[str]) -> Corpus:
    sentences: list[SentenceRecord] = []
    mentions: list[Mention] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"line {lineno}: invalid JSON ({exc})") from exc
        if not isinstance(record, dict):
            raise FormatError(f"line {lineno}: expected an object")
        kind = record.get("kind")
        if kind == "sentence":
            missing = [f for f in _SENTENCE_FIELDS if f not in record]
            if missing:
                raise FormatError(f"line {lineno}: sentence record missing {missing}")
            sentences.append(SentenceRecord(record["doc_id"], record["sent_id"], record["text"]))
        elif kind == "mention":
            missing = [f for f in _MENTION_FIELDS if f not in record]
            if missing:
                raise FormatError(f"line {lineno}: mention record missing {missing}")
            mentions.append(
                Mention(
                    mention_id=record["mention_id"],
                    doc_id=record["doc_id"],
                    sent_id=record["sent_id"],
                    text=record["text"],
                    start_char=int(record["start_char"]),
                    end_char=int(record["end_char"]),
                    gold_cluster=record.get("gold_cluster"),
                )
            )
        else:
            raise FormatError(f"line {lineno}: unknown record kind {kind!r}")
    return Corpus(sentences, mentions)


def read_corpus(path: str | Path) -> Corpus:
    with open(path, encoding="utf-8") as handle:
        return corpus_from_lines(handle)


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for line in corpus_to_lines(corpus):
            handle.write(line + "\n")


# ---------------------------------------------------------------------------
# Partition file format: one JSON object, labels and id lists sorted so the
# output is byte-stable.
# ---------------------------------------------------------------------------


def partition_to_json(partition: Partition) -> str:
    return json.dumps({"clusters": partition.as_clusters()}, ensure_ascii=False, sort_keys=True, indent=2)


def partition_from_json(text: str) -> Partition:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid partition JSON ({exc})") from exc
    clusters = payload.get("clusters") if isinstance(payload, dict) else None
    if not isinstance(clusters, dict):
        raise FormatError('partition JSON must be {"clusters": {label: [mention_id, ...]}}')
    assignment: dict[str, str] = {}
    for label, ids in clusters.items():
        if not isinstance(ids, list):
            raise FormatError(f"cluster {label!r} is not a list of mention_ids")
        for mention_id in ids:
            if mention_id in assignment:
                raise FormatError(f"mention {mention_id!r} appears in more than one cluster")
            assignment[mention_id] = label
    return Partition(assignment)


def read_partition(path: str | Path) -> Partition:
    with open(path, encoding="utf-8") as handle:
        return partition_from_json(handle.read())


def write_partition(partition: Partition, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(partition_to_json(partition) + "\n")

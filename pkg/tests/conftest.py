"""Shared fixtures: tiny hand-built corpora and seeded synthetic generators."""

from __future__ import annotations

import random
import string

import pytest

from softcoref.model import Corpus, Mention, Partition, SentenceRecord


def sentence_for(doc_id: str, sent_id: str, surface: str, prefix: str = "We used ") -> tuple:
    """A one-mention sentence plus the span offsets of the surface."""
    text = f"{prefix}{surface} for the analysis."
    start = len(prefix)
    return SentenceRecord(doc_id, sent_id, text), start, start + len(surface)


def build_corpus(rows: list[tuple[str, str, str, str | None]]) -> Corpus:
    """Corpus from (doc_id, sent_id, surface, gold) rows, one mention per sentence."""
    sentences = []
    mentions = []
    for idx, (doc_id, sent_id, surface, gold) in enumerate(rows):
        record, start, end = sentence_for(doc_id, sent_id, surface)
        sentences.append(record)
        mentions.append(
            Mention(
                mention_id=f"M{idx}",
                doc_id=doc_id,
                sent_id=sent_id,
                text=surface,
                start_char=start,
                end_char=end,
                gold_cluster=gold,
            )
        )
    return Corpus(sentences, mentions)


@pytest.fixture
def two_doc_corpus() -> Corpus:
    """Well-formed two-document fixture with gold labels."""
    return build_corpus(
        [
            ("D1", "S1", "MATLAB", "C1"),
            ("D1", "S2", "matlab", "C1"),
            ("D2", "S1", "SPSS", "C2"),
            ("D2", "S2", "GraphPad Prism", "C3"),
        ]
    )


def random_word(rng: random.Random, alphabet: str, lo: int, hi: int) -> str:
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(lo, hi)))


def random_corpus(seed: int, n_mentions: int, alphabet: str = "ab", lo: int = 2, hi: int = 7) -> Corpus:
    """Random corpus over a tiny alphabet so fuzzy links are plentiful.

    Every mention sits in its own sentence; documents are assigned
    round-robin over a handful of doc ids. Gold labels group mentions by
    exact surface so scoring-based tests have a reasonable key.
    """
    rng = random.Random(seed)
    rows = []
    for idx in range(n_mentions):
        surface = random_word(rng, alphabet, lo, hi)
        rows.append((f"D{idx % 5}", f"S{idx}", surface, f"G-{surface}"))
    return build_corpus(rows)


def shaped_corpus(seed: int, n_mentions: int = 300) -> Corpus:
    """Synthetic corpus shaped like the real training sets: roughly half
    the clusters are singletons, chain lengths are heavily skewed with one
    dominant chain, coreferent mentions are near-identical strings, and
    non-singleton chains often span documents.
    """
    rng = random.Random(seed)
    names: set[str] = set()
    while len(names) < n_mentions:  # more than enough for the cluster plan
        names.add(random_word(rng, string.ascii_lowercase, 6, 11))
    name_pool = sorted(names)
    rng.shuffle(name_pool)

    def variants(base: str) -> list[str]:
        return [
            base,
            base.upper(),
            base.capitalize(),
            f"{base} {rng.randint(2, 9)}",
            f"{base} {rng.randint(2, 9)}.0.{rng.randint(1, 9)}",
        ]

    # one dominant chain, a skewed tail of multi-mention chains, then singletons
    remaining = n_mentions
    cluster_sizes = [max(2, int(n_mentions * 0.12))]
    remaining -= cluster_sizes[0]
    while remaining > 0:
        if rng.random() < 0.55:
            size = 1
        else:
            size = min(remaining, rng.choice([2, 2, 3, 3, 4, 5, 8]))
        cluster_sizes.append(size)
        remaining -= size

    rows = []
    doc_counter = 0
    for cluster_idx, size in enumerate(cluster_sizes):
        base = name_pool[cluster_idx]
        gold = f"C{cluster_idx}"
        docs = [f"D{doc_counter + i}" for i in range(max(1, min(3, size)))]
        doc_counter += len(docs)
        for member in range(size):
            surface = base if size == 1 else rng.choice(variants(base))
            rows.append((rng.choice(docs), f"S{cluster_idx}_{member}", surface, gold))
    return build_corpus(rows)


def distinct_form_corpus(seed: int, n_forms: int, word_len: int = 4) -> Corpus:
    """One mention per form, all forms distinct after normalization."""
    rng = random.Random(seed)
    forms: set[str] = set()
    while len(forms) < n_forms:
        forms.add(random_word(rng, string.ascii_lowercase, word_len, word_len))
    rows = [
        (f"D{idx % 7}", f"S{idx}", form, f"C{idx}")
        for idx, form in enumerate(sorted(forms))
    ]
    return build_corpus(rows)


def partition_of(groups: dict[str, list[str]]) -> Partition:
    return Partition({m: label for label, ids in groups.items() for m in ids})

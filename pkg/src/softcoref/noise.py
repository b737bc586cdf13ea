"""Controlled noise injection: boundary modification and mention
substitution at exact rates, seeded and reproducible.

Exactly round(rate * N) mentions are targeted (exact-count selection, not
per-mention Bernoulli, so curves are reproducible at small N). Targets
with no admissible edit are returned unchanged and reported as skipped.
Gold labels are never touched: the protocol measures resolver degradation
against fixed truth. Randomness comes from numpy's Philox counter-based
generator, so one (kind, rate, seed) triple always produces the same
noisy corpus on this implementation.

Substituted text changes a sentence's length, so the owning sentence is
rewritten and the offsets of every later mention in that sentence are
shifted; the noisy corpus therefore still validates cleanly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import MissingGoldError
from .fuzzy import unique_forms
from .lexical import normalize_form
from .model import Corpus, Mention, SentenceRecord, validate_corpus

__all__ = [
    "NoiseConfig",
    "NoiseManifest",
    "select_targets",
    "perturb_boundary",
    "perturb_substitute",
    "apply_noise",
]

NOISE_KINDS = ("boundary", "substitution")

_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True)
class NoiseConfig:
    kind: str
    rate: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"kind must be one of {NOISE_KINDS}, got {self.kind!r}")
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError(f"rate must be in [0, 1], got {self.rate}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class NoiseManifest:
    """What a noise run did: targeted mention_ids and the skipped subset."""

    kind: str
    rate: float
    seed: int
    targets: tuple[str, ...]
    skipped: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "rate": self.rate,
            "seed": self.seed,
            "targets": list(self.targets),
            "skipped": list(self.skipped),
        }


def _rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.Generator(np.random.Philox(seed_or_rng))


def select_targets(n: int, rate: float, seed_or_rng) -> list[int]:
    """Exactly round(rate * n) distinct indices, uniform without
    replacement, sorted ascending. round() is the usual half-to-even."""
    count = int(round(rate * n))
    rng = _rng(seed_or_rng)
    picked = rng.choice(n, size=count, replace=False) if count else np.empty(0, dtype=np.int64)
    return sorted(int(i) for i in picked)


def _token_spans(text: str) -> list[tuple[int, int]]:
    return [(m.start(), m.end()) for m in _TOKEN.finditer(text)]


def perturb_boundary(
    mention: Mention, sentence: SentenceRecord, rng: np.random.Generator
) -> Mention:
    """Extend or truncate the span by one whitespace-delimited token.

    One edit is drawn uniformly from the admissible subset of
    {extend-left, extend-right, truncate-left, truncate-right}:
    truncations need a multi-token mention, extensions an adjacent token.
    With no admissible edit the mention is returned unchanged (the caller
    counts it as skipped). The sentence itself is untouched; the new text
    is a slice of it, so span invariants hold by construction.
    """
    start, end = mention.start_char, mention.end_char
    spans = _token_spans(sentence.text)
    mention_tokens = _token_spans(mention.text)

    options: list[tuple[int, int]] = []
    left = [s for s, _ in spans if s < start]
    if left:
        options.append((left[-1], end))
    right = [e for _, e in spans if e > end]
    if right:
        options.append((start, right[0]))
    if len(mention_tokens) >= 2:
        options.append((start + mention_tokens[1][0], end))
        options.append((start, start + mention_tokens[-2][1]))

    if not options:
        return mention
    new_start, new_end = options[int(rng.integers(len(options)))]
    return replace(
        mention,
        start_char=new_start,
        end_char=new_end,
        text=sentence.text[new_start:new_end],
    )


def perturb_substitute(
    mention: Mention,
    inventory: Sequence[str],
    gold_cluster_forms: Iterable[str],
    rng: np.random.Generator,
) -> Mention:
    """Replace the mention text with a different software name.

    The replacement is drawn uniformly from the inventory of normalized
    forms minus the mention's own form and minus every form of its gold
    cluster: swapping in a coreferent alias would not simulate an identity
    error. The gold label is deliberately kept. With no eligible form the
    mention is returned unchanged (skipped).
    """
    excluded = set(gold_cluster_forms) | {normalize_form(mention.text)}
    eligible = sorted(set(inventory) - excluded)
    if not eligible:
        return mention
    new_text = eligible[int(rng.integers(len(eligible)))]
    return replace(
        mention,
        text=new_text,
        end_char=mention.start_char + len(new_text),
    )


def apply_noise(corpus: Corpus, config: NoiseConfig) -> tuple[Corpus, NoiseManifest]:
    """Perturb round(rate * N) mentions; everything else stays identical.

    Requires a valid corpus with gold labels. Targets are processed in
    mention-index order; substitution rewrites the owning sentence in
    place and shifts later mentions in that sentence, so the output
    corpus re-validates. Deterministic for a fixed config.
    """
    if not corpus.has_gold():
        raise MissingGoldError("noise injection requires gold labels on every mention")
    problems = validate_corpus(corpus)
    if problems:
        first = problems[0]
        raise ValueError(f"refusing to perturb an invalid corpus ({first.kind}: {first.subject})")

    rng = _rng(config.seed)
    mentions = list(corpus.mentions)
    targets = select_targets(len(mentions), config.rate, rng)

    sentence_order = [s.key for s in corpus.sentences]
    sentence_text = {s.key: s.text for s in corpus.sentences}

    inventory: list[str] = []
    cluster_forms: dict[str, set[str]] = {}
    if config.kind == "substitution":
        inventory = unique_forms(corpus)
        for m in corpus.mentions:
            cluster_forms.setdefault(m.gold_cluster, set()).add(normalize_form(m.text))

    skipped: list[str] = []
    for idx in targets:
        m = mentions[idx]
        key = m.sentence_key
        if config.kind == "boundary":
            current = SentenceRecord(m.doc_id, m.sent_id, sentence_text[key])
            edited = perturb_boundary(m, current, rng)
            if edited == m:
                skipped.append(m.mention_id)
            else:
                mentions[idx] = edited
            continue

        # substitution: refuse targets overlapping another mention, since
        # rewriting the shared characters would corrupt the other span
        overlaps = any(
            other is not m
            and other.sentence_key == key
            and other.start_char < m.end_char
            and m.start_char < other.end_char
            for other in mentions
        )
        if overlaps:
            skipped.append(m.mention_id)
            continue
        edited = perturb_substitute(m, inventory, cluster_forms[m.gold_cluster], rng)
        if edited == m:
            skipped.append(m.mention_id)
            continue
        old_text = sentence_text[key]
        shift = len(edited.text) - (m.end_char - m.start_char)
        sentence_text[key] = (
            old_text[: m.start_char] + edited.text + old_text[m.end_char :]
        )
        mentions[idx] = edited
        if shift:
            for pos, other in enumerate(mentions):
                if pos != idx and other.sentence_key == key and other.start_char >= m.end_char:
                    mentions[pos] = replace(
                        other,
                        start_char=other.start_char + shift,
                        end_char=other.end_char + shift,
                    )

    noisy = Corpus(
        (SentenceRecord(k[0], k[1], sentence_text[k]) for k in sentence_order),
        mentions,
    )
    manifest = NoiseManifest(
        kind=config.kind,
        rate=config.rate,
        seed=int(config.seed),
        targets=tuple(corpus.mentions[i].mention_id for i in targets),
        skipped=tuple(skipped),
    )
    return noisy, manifest

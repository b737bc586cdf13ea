"""The context-aware resolver: combined mention/document vectors clustered
under average-linkage agglomerative clustering with cosine distance.

Each mention instance gets e = alpha * e_m + (1 - alpha) * e_d, where e_m
is the unit-normalized embedding of its normalized surface form and e_d
the unit-normalized embedding of its document context. The combined
vector is deliberately not re-normalized: cosine distance downstream is
scale-invariant, so the omission is harmless and keeps the combination a
plain weighted sum.

Embeddings arrive through an EmbeddingTable keyed by normalized form and
by "doc:"+doc_id; a deterministic trigram-hashing embedder is provided so
the resolver runs with no external encoder at all.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .counters import WorkCounter
from .errors import (
    DimensionMismatchError,
    FormatError,
    MissingEmbeddingError,
    UnknownDocumentError,
)
from .lexical import normalize_form
from .model import Corpus, Partition

__all__ = [
    "CarConfig",
    "EmbeddingTable",
    "DOC_KEY_PREFIX",
    "doc_key",
    "build_doc_context",
    "unit_normalize",
    "combine",
    "cosine_distance",
    "agglomerative_cluster",
    "cluster_distances",
    "resolve_car",
    "hash_embed",
    "hash_table_for",
    "read_embedding_table",
    "write_embedding_table",
    "coverage_gaps",
]

logger = logging.getLogger(__name__)

DOC_KEY_PREFIX = "doc:"
DEFAULT_ALPHA = 0.6
DEFAULT_DELTA = 0.4
DEFAULT_MAX_CONTEXT = 10
HASH_EMBED_DIM = 64


def doc_key(doc_id: str) -> str:
    """Table key for a document context vector; the prefix keeps document
    keys from colliding with mention-form keys in the one flat table."""
    return DOC_KEY_PREFIX + doc_id


@dataclass(frozen=True)
class CarConfig:
    alpha: float = DEFAULT_ALPHA
    delta: float = DEFAULT_DELTA
    max_context_sentences: int = DEFAULT_MAX_CONTEXT

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.delta < 0.0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if self.max_context_sentences < 1:
            raise ValueError("max_context_sentences must be positive")


class EmbeddingTable:
    """Fixed-dimension key -> float64 vector map.

    Every vector must have exactly ``dim`` finite components; violations
    raise DimensionMismatchError/ValueError at insertion time so a loaded
    table is always internally consistent.
    """

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = int(dim)
        self.entries: dict[str, np.ndarray] = {}

    def add(self, key: str, vector) -> None:
        arr = np.asarray(vector, dtype=np.float64)
        if arr.shape != (self.dim,):
            raise DimensionMismatchError(
                f"vector for {key!r} has shape {arr.shape}, expected ({self.dim},)"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"vector for {key!r} has non-finite components")
        arr.setflags(write=False)
        self.entries[key] = arr

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def __getitem__(self, key: str) -> np.ndarray:
        return self.entries[key]

    def __len__(self) -> int:
        return len(self.entries)


def build_doc_context(corpus: Corpus, doc_id: str, max_sentences: int = DEFAULT_MAX_CONTEXT) -> str:
    """Join the first ``max_sentences`` distinct mention-bearing sentence
    texts of a document (document order, exact-string dedupe) with single
    spaces. A document with sentences but no mentions yields "".
    """
    doc_sentences = [s for s in corpus.sentences if s.doc_id == doc_id]
    if not doc_sentences:
        raise UnknownDocumentError(f"no sentences for doc_id {doc_id!r}")
    bearing = {(m.doc_id, m.sent_id) for m in corpus.mentions if m.doc_id == doc_id}
    picked: list[str] = []
    seen: set[str] = set()
    for s in doc_sentences:
        if s.key not in bearing or s.text in seen:
            continue
        picked.append(s.text)
        seen.add(s.text)
        if len(picked) >= max_sentences:
            break
    return " ".join(picked)


def unit_normalize(v) -> np.ndarray:
    """Scale to unit L2 norm; the zero vector is left as-is."""
    arr = np.asarray(v, dtype=np.float64)
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        return arr.copy()
    return arr / norm


def combine(e_m, e_d, alpha: float) -> np.ndarray:
    """Weighted sum alpha * e_m + (1 - alpha) * e_d, not re-normalized."""
    m = np.asarray(e_m, dtype=np.float64)
    d = np.asarray(e_d, dtype=np.float64)
    if m.shape != d.shape:
        raise DimensionMismatchError(f"cannot combine shapes {m.shape} and {d.shape}")
    return alpha * m + (1.0 - alpha) * d


def cosine_distance(u, v) -> float:
    """1 - cos(u, v), in [0, 2]. A zero-norm input yields the maximally
    non-committal distance 1 instead of an error."""
    a = np.asarray(u, dtype=np.float64)
    b = np.asarray(v, dtype=np.float64)
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 1.0
    d = 1.0 - float(np.dot(a, b)) / (na * nb)
    return min(2.0, max(0.0, d))


def _pairwise_cosine_distances(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1)
    zero = norms == 0.0
    if np.any(zero):
        logger.warning("%d zero-norm vector(s); using distance 1 to everything", int(zero.sum()))
    safe = np.where(zero, 1.0, norms)
    unit = vectors / safe[:, None]
    dist = 1.0 - unit @ unit.T
    np.clip(dist, 0.0, 2.0, out=dist)
    # identical vectors must sit at exactly 0 so they coalesce even at
    # delta = 0; rounding in the normalized dot product can miss by 1 ulp
    _, inverse = np.unique(vectors, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    for group in np.flatnonzero(np.bincount(inverse) > 1):
        idx = np.flatnonzero(inverse == group)
        dist[np.ix_(idx, idx)] = 0.0
    dist[zero, :] = 1.0
    dist[:, zero] = 1.0
    return dist


def cluster_distances(distances: np.ndarray, delta: float) -> list[int]:
    """Average-linkage agglomerative clustering over a precomputed
    distance matrix, stopping at the ``delta`` threshold.

    Starting from singletons, repeatedly merge the cluster pair with the
    smallest linkage (unweighted mean of all cross-pair distances) while
    that linkage is below delta; exact-zero linkages are always mergeable,
    so identical points coalesce even at delta = 0. Ties break on the
    smallest (i, j) pair of cluster indices, where a cluster's index is
    its smallest member. Returned labels are those smallest members.
    """
    n = len(distances)
    if n == 0:
        return []
    # upper triangle only, so a flat argmin lands on the smallest (i, j)
    work = np.asarray(distances, dtype=np.float64).copy()
    work[np.tril_indices(n)] = np.inf
    sizes = np.ones(n, dtype=np.int64)
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    active = n
    while active > 1:
        flat = int(np.argmin(work))
        i, j = divmod(flat, n)
        best = work[i, j]
        if not (best == 0.0 or best < delta):
            break
        # representatives are minima of their clusters, so i absorbs j
        for k in members:
            if k == i or k == j:
                continue
            a, b = (i, k) if i < k else (k, i)
            c, d = (j, k) if j < k else (k, j)
            work[a, b] = (sizes[i] * work[a, b] + sizes[j] * work[c, d]) / (sizes[i] + sizes[j])
        sizes[i] += sizes[j]
        members[i].extend(members.pop(j))
        work[j, :] = np.inf
        work[:, j] = np.inf
        active -= 1
    labels = [0] * n
    for rep, idxs in members.items():
        for idx in idxs:
            labels[idx] = rep
    return labels


def agglomerative_cluster(vectors: Sequence, delta: float) -> list[int]:
    """Cluster vectors under cosine distance; see cluster_distances."""
    if len(vectors) == 0:
        return []
    matrix = np.asarray(vectors, dtype=np.float64)
    if matrix.ndim != 2:
        raise DimensionMismatchError("vectors must share one dimension")
    return cluster_distances(_pairwise_cosine_distances(matrix), delta)


def resolve_car(
    corpus: Corpus,
    table: EmbeddingTable,
    config: CarConfig,
    counter: Optional[WorkCounter] = None,
) -> Partition:
    """Combine per-mention and per-document vectors, then cluster.

    The table must hold a vector for every normalized mention form and for
    doc_key(doc_id) of every document containing mentions; the first
    absent key raises MissingEmbeddingError. Cluster labels are the
    mention_id of each cluster's smallest-index member.
    """
    if not corpus.mentions:
        return Partition({})
    combined = np.empty((len(corpus.mentions), table.dim), dtype=np.float64)
    for row, m in enumerate(corpus.mentions):
        form = normalize_form(m.text)
        if form not in table:
            raise MissingEmbeddingError(f"embedding table lacks key {form!r}")
        dkey = doc_key(m.doc_id)
        if dkey not in table:
            raise MissingEmbeddingError(f"embedding table lacks key {dkey!r}")
        combined[row] = combine(
            unit_normalize(table[form]), unit_normalize(table[dkey]), config.alpha
        )
    if counter is not None:
        counter.combine_ops += len(corpus.mentions)
    labels = cluster_distances(_pairwise_cosine_distances(combined), config.delta)
    assignment = {
        m.mention_id: corpus.mentions[labels[row]].mention_id
        for row, m in enumerate(corpus.mentions)
    }
    return Partition(assignment)


def hash_embed(key: str, dim: int = HASH_EMBED_DIM) -> np.ndarray:
    """Deterministic character-trigram hashing embedder.

    Trigrams of "#"+key+"#" are hashed into ``dim`` buckets with signed
    unit counts, then unit-normalized; the padding gives even one-character
    keys a nonzero vector. Pure function of (key, dim), identical across
    runs and platforms. Intended as a test/fallback embedder, not a
    semantic model.
    """
    if dim < 8:
        raise ValueError(f"dim must be >= 8, got {dim}")
    padded = "#" + key + "#"
    counts = np.zeros(dim, dtype=np.float64)
    for pos in range(len(padded) - 2):
        digest = hashlib.blake2b(padded[pos : pos + 3].encode("utf-8"), digest_size=9).digest()
        bucket = int.from_bytes(digest[:8], "little") % dim
        counts[bucket] += 1.0 if digest[8] & 1 else -1.0
    return unit_normalize(counts)


def hash_table_for(corpus: Corpus, dim: int = HASH_EMBED_DIM) -> EmbeddingTable:
    """EmbeddingTable covering resolve_car's demand for a corpus, built
    entirely from hash_embed (no external encoder)."""
    table = EmbeddingTable(dim)
    for form in sorted({normalize_form(m.text) for m in corpus.mentions}):
        table.add(form, hash_embed(form, dim))
    for doc_id in sorted({m.doc_id for m in corpus.mentions}):
        table.add(doc_key(doc_id), hash_embed(build_doc_context(corpus, doc_id), dim))
    return table


# ---------------------------------------------------------------------------
# Embedding interchange file: JSONL with one header record then one vector
# record per key. Decimal text round-trips exactly under repr-based JSON
# serialization, comfortably within the 1e-6 relative-error bound.
# ---------------------------------------------------------------------------


def write_embedding_table(
    table: EmbeddingTable, path: str | Path, model: str = "unspecified"
) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        header = {"kind": "header", "dim": table.dim, "model": model}
        handle.write(json.dumps(header, ensure_ascii=False, separators=(",", ":")) + "\n")
        for key in sorted(table.entries):
            record = {"kind": "vector", "key": key, "vector": table.entries[key].tolist()}
            handle.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n")


def read_embedding_table(path: str | Path) -> EmbeddingTable:
    table: Optional[EmbeddingTable] = None
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"line {lineno}: invalid JSON ({exc})") from exc
            kind = record.get("kind")
            if table is None:
                if kind != "header":
                    raise FormatError(f"line {lineno}: first record must be the header")
                dim = record.get("dim")
                if not isinstance(dim, int) or dim < 1:
                    raise FormatError(f"line {lineno}: header dim must be a positive integer")
                table = EmbeddingTable(dim)
            elif kind == "vector":
                key = record.get("key")
                vector = record.get("vector")
                if not isinstance(key, str) or not isinstance(vector, list):
                    raise FormatError(f"line {lineno}: vector record needs a key and a vector")
                if len(vector) != table.dim:
                    raise DimensionMismatchError(
                        f"line {lineno}: vector for {key!r} has {len(vector)} components, "
                        f"header says {table.dim}"
                    )
                if key in table:
                    raise FormatError(f"line {lineno}: duplicate key {key!r}")
                table.add(key, vector)
            else:
                raise FormatError(f"line {lineno}: unknown record kind {kind!r}")
    if table is None:
        raise FormatError("embedding file is empty (missing header)")
    return table


def coverage_gaps(corpus: Corpus, table: EmbeddingTable) -> list[str]:
    """Keys resolve_car would need that the table lacks, in demand order."""
    gaps: list[str] = []
    seen: set[str] = set()
    for m in corpus.mentions:
        for key in (normalize_form(m.text), doc_key(m.doc_id)):
            if key not in table and key not in seen:
                gaps.append(key)
                seen.add(key)
    return gaps

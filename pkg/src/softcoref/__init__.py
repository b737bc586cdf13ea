"""Cross-document software-mention coreference toolkit.

Two unsupervised resolvers (threshold-linked fuzzy matching over surface
forms; agglomeratively clustered context-aware embeddings), a full
coreference scorer (MUC, B-cubed, CEAFe, CoNLL F1), a threshold tuner, a
seeded noise-injection harness, corpus diagnostics, and a timing
benchmark.
"""

__version__ = "0.1.0"

from .analysis import (
    CorpusStats,
    TimingReport,
    TuneResult,
    bench,
    compute_stats,
    noise_sweep,
    tune_theta,
)
from .car import (
    CarConfig,
    EmbeddingTable,
    agglomerative_cluster,
    build_doc_context,
    hash_embed,
    hash_table_for,
    read_embedding_table,
    resolve_car,
    write_embedding_table,
)
from .counters import WorkCounter
from .errors import SoftcorefError
from .fuzzy import FuzzyConfig, resolve_fuzzy, unique_forms
from .lexical import normalize_form, ro_similarity
from .model import (
    Corpus,
    Mention,
    Partition,
    SentenceRecord,
    gold_partition,
    partition_stats,
    read_corpus,
    read_partition,
    validate_corpus,
    write_corpus,
    write_partition,
)
from .noise import NoiseConfig, apply_noise, select_targets
from .scoring import PRF, ScoreReport, b_cubed, ceaf_e, muc, optimal_assignment, score_all

__all__ = [
    "__version__",
    "CorpusStats",
    "TimingReport",
    "TuneResult",
    "bench",
    "compute_stats",
    "noise_sweep",
    "tune_theta",
    "CarConfig",
    "EmbeddingTable",
    "agglomerative_cluster",
    "build_doc_context",
    "hash_embed",
    "hash_table_for",
    "read_embedding_table",
    "resolve_car",
    "write_embedding_table",
    "WorkCounter",
    "SoftcorefError",
    "FuzzyConfig",
    "resolve_fuzzy",
    "unique_forms",
    "normalize_form",
    "ro_similarity",
    "Corpus",
    "Mention",
    "Partition",
    "SentenceRecord",
    "gold_partition",
    "partition_stats",
    "read_corpus",
    "read_partition",
    "validate_corpus",
    "write_corpus",
    "write_partition",
    "NoiseConfig",
    "apply_noise",
    "select_targets",
    "PRF",
    "ScoreReport",
    "b_cubed",
    "ceaf_e",
    "muc",
    "optimal_assignment",
    "score_all",
]

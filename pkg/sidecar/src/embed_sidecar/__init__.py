"""Embedding sidecar for the softcoref toolkit."""

__version__ = "0.1.0"

from .core import (
    DEFAULT_MODEL,
    DOC_KEY_PREFIX,
    MAX_CONTEXT_SENTENCES,
    SentenceEncoder,
    SidecarConfig,
    SidecarError,
    doc_contexts,
    embed_corpus,
    normalize_form,
    read_simple_corpus,
)

__all__ = [
    "__version__",
    "DEFAULT_MODEL",
    "DOC_KEY_PREFIX",
    "MAX_CONTEXT_SENTENCES",
    "SentenceEncoder",
    "SidecarConfig",
    "SidecarError",
    "doc_contexts",
    "embed_corpus",
    "normalize_form",
    "read_simple_corpus",
]

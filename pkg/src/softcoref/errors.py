"""Exception types shared across the toolkit.

The CLI maps every SoftcorefError to exit code 1 (data error); usage
errors are handled by argparse and exit with 2.
"""


class SoftcorefError(Exception):
    """Base class for all toolkit errors."""


class FormatError(SoftcorefError):
    """A corpus, partition, or embedding file does not match its schema."""


class MissingGoldError(SoftcorefError):
    """An operation requiring gold cluster labels found mentions without them."""


class MentionSetMismatchError(SoftcorefError):
    """Key and response partitions do not cover the identical mention set."""


class MissingEmbeddingError(SoftcorefError):
    """The embedding table lacks a key required by the resolver."""


class UnknownDocumentError(SoftcorefError):
    """A doc_id was requested that does not exist in the corpus."""


class DimensionMismatchError(SoftcorefError):
    """Two vectors (or a vector and a table) disagree on dimensionality."""

"""Operation counters for hardware-independent scaling checks."""

from dataclasses import dataclass


@dataclass
class WorkCounter:
    """Tallies of the dominant per-resolver operations.

    similarity_evals counts pairwise string-similarity evaluations made by
    the fuzzy resolver; combine_ops counts per-mention vector combinations
    made by the embedding resolver. The benchmark reports both so scaling
    behaviour can be asserted without trusting wall-clock.
    """

    similarity_evals: int = 0
    combine_ops: int = 0

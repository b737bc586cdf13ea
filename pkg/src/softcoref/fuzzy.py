"""The fuzzy-matching resolver.

Pipeline: deduplicate normalized surface forms, link every form pair whose
similarity clears the threshold, take the transitive closure of the links,
and broadcast component labels back to mention instances. Similarity is
computed over unique forms rather than instances because instances of one
form are trivially co-clustered; this is an exact optimization. The
resolver is entirely agnostic to document structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .counters import WorkCounter
from .lexical import GestaltMatcher, normalize_form
from .model import Corpus, Partition

__all__ = [
    "FuzzyConfig",
    "unique_forms",
    "link_pairs",
    "connected_components",
    "resolve_fuzzy",
]

DEFAULT_THETA = 0.83


@dataclass(frozen=True)
class FuzzyConfig:
    """Linking threshold theta in [0, 1]."""

    theta: float = DEFAULT_THETA

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must be in [0, 1], got {self.theta}")


def unique_forms(corpus: Corpus) -> list[str]:
    """Deduplicated normalized surface forms, in lexicographic order."""
    return sorted({normalize_form(m.text) for m in corpus.mentions})


def link_pairs(
    forms: Sequence[str], theta: float, counter: Optional[WorkCounter] = None
) -> list[tuple[int, int]]:
    """Edges (i, j), i < j, where similarity(forms[i], forms[j]) >= theta.

    ``forms`` must be deduplicated; callers pass the lexicographically
    sorted output of unique_forms so that index order equals lexicographic
    order and every pair is scored with its arguments in that order (the
    symmetry guarantee). Edges come out sorted by (i, j).
    """
    edges: list[tuple[int, int]] = []
    evals = 0
    for j in range(1, len(forms)):
        matcher = GestaltMatcher(forms[j])
        for i in range(j):
            evals += 1
            if matcher.similarity(forms[i]) >= theta:
                edges.append((i, j))
    if counter is not None:
        counter.similarity_evals += evals
    edges.sort()
    return edges


class _UnionFind:
    """Disjoint sets over range(n) with path compression."""

    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx


def connected_components(n: int, edges: Sequence[tuple[int, int]]) -> list[int]:
    """Component label per index; each component is labeled by its smallest member."""
    uf = _UnionFind(n)
    for i, j in edges:
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge ({i},{j}) references an index outside range({n})")
        uf.union(i, j)
    smallest: dict[int, int] = {}
    for idx in range(n):
        root = uf.find(idx)
        if root not in smallest:
            smallest[root] = idx  # first visit in ascending order is the minimum
    return [smallest[uf.find(idx)] for idx in range(n)]


def resolve_fuzzy(
    corpus: Corpus, config: FuzzyConfig, counter: Optional[WorkCounter] = None
) -> Partition:
    """Cluster mentions by threshold-linked forms under transitive closure.

    Two mention instances share a cluster iff their normalized forms lie in
    the same connected component of the threshold graph. Cluster labels are
    the lexicographically smallest form of each component. Deterministic
    for fixed input; an empty corpus yields the empty partition.
    """
    forms = unique_forms(corpus)
    edges = link_pairs(forms, config.theta, counter)
    labels = connected_components(len(forms), edges)
    form_index = {form: idx for idx, form in enumerate(forms)}
    assignment = {
        m.mention_id: forms[labels[form_index[normalize_form(m.text)]]]
        for m in corpus.mentions
    }
    return Partition(assignment)

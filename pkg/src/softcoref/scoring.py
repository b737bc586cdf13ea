"""Coreference evaluation: MUC, B-cubed, CEAFe, and their CoNLL average.

All three metrics require the key and response partitions to cover the
identical mention set; aligning mismatched mention sets is out of scope
and raises MentionSetMismatchError instead. Singleton clusters are kept
in B-cubed and CEAFe and are vacuous in MUC (a one-mention chain has no
links). Every 0/0 precision or recall ratio is defined as 0, except that
scoring two empty partitions yields perfect scores by the vacuous-
agreement convention. Scores are computed in float64; rounding happens
only at serialization time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import MentionSetMismatchError
from .model import Partition

__all__ = [
    "PRF",
    "ScoreReport",
    "muc",
    "b_cubed",
    "ceaf_e",
    "optimal_assignment",
    "score_all",
    "score_report_to_json",
]


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float


def _prf(precision: float, recall: float) -> PRF:
    total = precision + recall
    f1 = 2.0 * precision * recall / total if total > 0.0 else 0.0
    return PRF(precision, recall, f1)


_PERFECT = PRF(1.0, 1.0, 1.0)


@dataclass(frozen=True)
class ScoreReport:
    muc: PRF
    b3: PRF
    ceafe: PRF
    conll_f1: float


def _check_mention_sets(key: Partition, response: Partition) -> None:
    if set(key.assignment) != set(response.assignment):
        only_key = sorted(set(key.assignment) - set(response.assignment))[:3]
        only_resp = sorted(set(response.assignment) - set(key.assignment))[:3]
        raise MentionSetMismatchError(
            f"key and response cover different mentions "
            f"(e.g. only in key: {only_key}, only in response: {only_resp})"
        )


def _clusters(partition: Partition) -> list[set[str]]:
    return [set(ids) for _, ids in sorted(partition.as_clusters().items())]


def muc(key: Partition, response: Partition) -> PRF:
    """Link-based metric: recall is the fraction of key links recovered,
    where a chain of size s carries s-1 links and a chain split into p
    response parts loses p-1 of them. Precision swaps the roles.
    Singleton chains contribute nothing to their own side's sums.
    """
    _check_mention_sets(key, response)
    if not key.assignment:
        return _PERFECT

    def directed(chains: list[set[str]], other_label: dict[str, str]) -> float:
        numerator = sum(len(c) - len({other_label[m] for m in c}) for c in chains)
        denominator = sum(len(c) - 1 for c in chains)
        return numerator / denominator if denominator > 0 else 0.0

    recall = directed(_clusters(key), response.assignment)
    precision = directed(_clusters(response), key.assignment)
    return _prf(precision, recall)


def b_cubed(key: Partition, response: Partition) -> PRF:
    """Mention-centric metric: per-mention overlap between its key chain
    and its response chain, averaged over all mentions."""
    _check_mention_sets(key, response)
    if not key.assignment:
        return _PERFECT
    key_cluster = _cluster_of(key)
    resp_cluster = _cluster_of(response)
    mentions = list(key.assignment)
    recall = sum(
        len(key_cluster[m] & resp_cluster[m]) / len(key_cluster[m]) for m in mentions
    ) / len(mentions)
    precision = sum(
        len(key_cluster[m] & resp_cluster[m]) / len(resp_cluster[m]) for m in mentions
    ) / len(mentions)
    return _prf(precision, recall)


def _cluster_of(partition: Partition) -> dict[str, frozenset[str]]:
    by_label: dict[str, frozenset[str]] = {
        label: frozenset(ids) for label, ids in partition.as_clusters().items()
    }
    return {m: by_label[label] for m, label in partition.assignment.items()}


def optimal_assignment(score_matrix: Sequence[Sequence[float]]) -> tuple[list[tuple[int, int]], float]:
    """Maximize the total score of a one-to-one row/column matching.

    Kuhn-Munkres on the rectangular matrix (scipy); the matched-pair list
    may differ between equally good matchings, but the total is unique.
    """
    matrix = np.asarray(score_matrix, dtype=np.float64)
    if matrix.size == 0:
        return [], 0.0
    rows, cols = linear_sum_assignment(matrix, maximize=True)
    pairs = sorted(zip(rows.tolist(), cols.tolist()))
    return pairs, float(matrix[rows, cols].sum())


def ceaf_e(key: Partition, response: Partition) -> PRF:
    """Entity-based metric over the optimal one-to-one cluster alignment
    under phi4(K, S) = 2|K n S| / (|K| + |S|)."""
    _check_mention_sets(key, response)
    if not key.assignment:
        return _PERFECT
    key_clusters = _clusters(key)
    resp_clusters = _clusters(response)
    phi = [
        [2.0 * len(k & s) / (len(k) + len(s)) for s in resp_clusters]
        for k in key_clusters
    ]
    _, total = optimal_assignment(phi)
    precision = total / len(resp_clusters)
    recall = total / len(key_clusters)
    return _prf(precision, recall)


def score_all(key: Partition, response: Partition) -> ScoreReport:
    """All three metrics plus their exact unweighted mean (CoNLL F1)."""
    m = muc(key, response)
    b = b_cubed(key, response)
    c = ceaf_e(key, response)
    return ScoreReport(muc=m, b3=b, ceafe=c, conll_f1=(m.f1 + b.f1 + c.f1) / 3.0)


def score_report_to_json(report: ScoreReport) -> str:
    """Serialize with 4 decimal places (round-half-to-even at print time)."""

    def prf_dict(prf: PRF) -> dict[str, float]:
        return {"p": round(prf.precision, 4), "r": round(prf.recall, 4), "f1": round(prf.f1, 4)}

    payload = {
        "muc": prf_dict(report.muc),
        "b3": prf_dict(report.b3),
        "ceafe": prf_dict(report.ceafe),
        "conll_f1": round(report.conll_f1, 4),
    }
    return json.dumps(payload, indent=2)

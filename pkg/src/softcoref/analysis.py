"""Corpus diagnostics, threshold tuning, and the timing benchmark.

The tuner evaluates the fuzzy resolver over a theta grid against gold.
Pairwise form similarities do not depend on theta, so they are computed
once and the grid only re-thresholds, re-closes, and re-scores; a direct
loop over resolver + scorer must produce the identical curve (the test
suite checks exactly that).
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

from .counters import WorkCounter
from .errors import MissingGoldError
from .fuzzy import connected_components, unique_forms
from .lexical import GestaltMatcher, normalize_form, ro_similarity
from .model import Corpus, Partition, gold_partition
from .noise import NoiseConfig, apply_noise
from .scoring import score_all

__all__ = [
    "CorpusStats",
    "TuneResult",
    "TimingReport",
    "SweepRow",
    "compute_stats",
    "tune_theta",
    "theta_grid",
    "bench",
    "noise_sweep",
    "write_sweep_csv",
    "write_tune_csv",
]


@dataclass(frozen=True)
class CorpusStats:
    documents: int
    sentences_with_mentions: int
    mention_instances: int
    unique_surface_forms: int
    total_clusters: int
    avg_chain_length: float
    max_chain_length: int
    singleton_rate: float
    crossdoc_rate_all: float
    crossdoc_rate_nonsingleton: float
    crossdoc_nonsingleton_defined: bool
    avg_forms_per_cluster: float
    avg_intracluster_lexsim: float

    def to_dict(self) -> dict:
        return {
            "documents": self.documents,
            "sentences_with_mentions": self.sentences_with_mentions,
            "mention_instances": self.mention_instances,
            "unique_surface_forms": self.unique_surface_forms,
            "total_clusters": self.total_clusters,
            "avg_chain_length": self.avg_chain_length,
            "max_chain_length": self.max_chain_length,
            "singleton_rate": self.singleton_rate,
            "crossdoc_rate_all": self.crossdoc_rate_all,
            "crossdoc_rate_nonsingleton": self.crossdoc_rate_nonsingleton,
            "crossdoc_nonsingleton_defined": self.crossdoc_nonsingleton_defined,
            "avg_forms_per_cluster": self.avg_forms_per_cluster,
            "avg_intracluster_lexsim": self.avg_intracluster_lexsim,
        }


def compute_stats(corpus: Corpus, include_singletons: bool = False) -> CorpusStats:
    """Corpus-level statistics over the gold clustering.

    Averages over chains include singleton clusters. The intra-cluster
    lexical similarity is, by default, the mean over clusters of at least
    two mentions of the mean pairwise similarity between normalized
    mention instances; include_singletons adds singleton clusters at
    similarity 1.0. The cross-document rate over non-singleton clusters
    is undefined for an all-singleton corpus and then reported as 0 with
    crossdoc_nonsingleton_defined = False.
    """
    if not corpus.has_gold():
        raise MissingGoldError("corpus statistics require gold labels")

    clusters: dict[str, list] = {}
    for m in corpus.mentions:
        clusters.setdefault(m.gold_cluster, []).append(m)
    total = len(clusters)
    sizes = [len(ms) for ms in clusters.values()]

    singletons = sum(1 for s in sizes if s == 1)
    crossdoc_all = sum(1 for ms in clusters.values() if len({m.doc_id for m in ms}) >= 2)
    nonsingleton = [ms for ms in clusters.values() if len(ms) >= 2]
    crossdoc_nonsingleton = sum(1 for ms in nonsingleton if len({m.doc_id for m in ms}) >= 2)

    sim_cache: dict[tuple[str, str], float] = {}

    def cached_similarity(a: str, b: str) -> float:
        if b < a:
            a, b = b, a
        found = sim_cache.get((a, b))
        if found is None:
            found = sim_cache[(a, b)] = ro_similarity(a, b)
        return found

    cluster_sims: list[float] = []
    for ms in sorted(clusters.values(), key=lambda ms: ms[0].gold_cluster):
        if len(ms) >= 2:
            forms = [normalize_form(m.text) for m in ms]
            pair_sims = [
                cached_similarity(forms[i], forms[j])
                for i in range(len(forms))
                for j in range(i + 1, len(forms))
            ]
            cluster_sims.append(statistics.fmean(pair_sims))
        elif include_singletons:
            cluster_sims.append(1.0)

    return CorpusStats(
        documents=len({s.doc_id for s in corpus.sentences}),
        sentences_with_mentions=len({m.sentence_key for m in corpus.mentions}),
        mention_instances=len(corpus.mentions),
        unique_surface_forms=len(unique_forms(corpus)),
        total_clusters=total,
        avg_chain_length=len(corpus.mentions) / total if total else 0.0,
        max_chain_length=max(sizes, default=0),
        singleton_rate=singletons / total if total else 0.0,
        crossdoc_rate_all=crossdoc_all / total if total else 0.0,
        crossdoc_rate_nonsingleton=(
            crossdoc_nonsingleton / len(nonsingleton) if nonsingleton else 0.0
        ),
        crossdoc_nonsingleton_defined=bool(nonsingleton),
        avg_forms_per_cluster=(
            statistics.fmean(len({normalize_form(m.text) for m in ms}) for ms in clusters.values())
            if clusters
            else 0.0
        ),
        avg_intracluster_lexsim=statistics.fmean(cluster_sims) if cluster_sims else 0.0,
    )


@dataclass(frozen=True)
class TuneResult:
    best_theta: float
    best_f1: float
    curve: tuple[tuple[float, float], ...]
    cluster_counts: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "best_theta": self.best_theta,
            "best_f1": self.best_f1,
            "curve": [[t, f] for t, f in self.curve],
        }


def theta_grid(grid_step: float) -> list[float]:
    """Inclusive grid over [0, 1]; 1.0 is appended when the step misses it."""
    if not 0.0 < grid_step <= 1.0:
        raise ValueError(f"grid_step must be in (0, 1], got {grid_step}")
    points = int(round(1.0 / grid_step))
    grid = [round(i * grid_step, 12) for i in range(points + 1) if i * grid_step <= 1.0 + 1e-12]
    grid = [min(t, 1.0) for t in grid]
    if grid[-1] < 1.0:
        grid.append(1.0)
    return grid


def tune_theta(corpus: Corpus, grid_step: float = 0.01) -> TuneResult:
    """Grid-search theta for the fuzzy resolver, maximizing CoNLL F1.

    Pair similarities are computed once; each grid point re-applies the
    threshold, closure, and scorer. Ties resolve to the smallest theta.
    The fuzzy coarsening property makes the cluster count non-decreasing
    in theta, which is asserted on every run.
    """
    gold = gold_partition(corpus)
    forms = unique_forms(corpus)
    form_index = {form: idx for idx, form in enumerate(forms)}
    mention_form_idx = [
        (m.mention_id, form_index[normalize_form(m.text)]) for m in corpus.mentions
    ]

    scored_pairs: list[tuple[int, int, float]] = []
    for j in range(1, len(forms)):
        matcher = GestaltMatcher(forms[j])
        for i in range(j):
            scored_pairs.append((i, j, matcher.similarity(forms[i])))

    curve: list[tuple[float, float]] = []
    counts: list[int] = []
    for theta in theta_grid(grid_step):
        edges = [(i, j) for i, j, s in scored_pairs if s >= theta]
        labels = connected_components(len(forms), edges)
        partition = Partition(
            {mention_id: forms[labels[fidx]] for mention_id, fidx in mention_form_idx}
        )
        report = score_all(gold, partition)
        curve.append((theta, report.conll_f1))
        counts.append(len(set(labels)))

    for prev, cur in zip(counts, counts[1:]):
        if cur < prev:
            raise RuntimeError("cluster count decreased while theta increased; resolver bug")

    best_theta, best_f1 = max(curve, key=lambda point: (point[1], -point[0]))
    return TuneResult(
        best_theta=best_theta,
        best_f1=best_f1,
        curve=tuple(curve),
        cluster_counts=tuple(counts),
    )


def write_tune_csv(result: TuneResult, path: str | Path) -> None:
    """Two-column curve (theta, conll_f1) for plotting."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["theta", "conll_f1"])
        for theta, f1 in result.curve:
            writer.writerow([theta, f1])


@dataclass(frozen=True)
class TimingReport:
    runs: int
    mean_seconds: float
    std_seconds: float
    conll_f1: float
    similarity_evals: int = 0
    combine_ops: int = 0

    @property
    def efficiency(self) -> float:
        """CoNLL F1 per second of mean inference time."""
        return self.conll_f1 / self.mean_seconds

    def to_dict(self) -> dict:
        return {
            "runs": self.runs,
            "mean_seconds": self.mean_seconds,
            "std_seconds": self.std_seconds,
            "conll_f1": self.conll_f1,
            "efficiency": self.efficiency,
            "similarity_evals": self.similarity_evals,
            "combine_ops": self.combine_ops,
        }


Resolver = Callable[[Corpus, Optional[WorkCounter]], Partition]


def bench(resolver: Resolver, corpus: Corpus, gold: Partition, runs: int = 5) -> TimingReport:
    """Wall-clock the resolver end-to-end on pre-loaded inputs.

    Runs strictly sequentially; asserts the output partition is identical
    across runs (resolvers are pure), scores it once against gold, and
    reports mean/sample-std seconds plus the operation counters of the
    final run. A single run reports std 0 by convention.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    times: list[float] = []
    partitions: list[Partition] = []
    counter = WorkCounter()
    for _ in range(runs):
        counter = WorkCounter()
        started = time.perf_counter()
        partitions.append(resolver(corpus, counter))
        times.append(time.perf_counter() - started)
    for other in partitions[1:]:
        if other.assignment != partitions[0].assignment:
            raise RuntimeError("resolver output differed between benchmark runs")
    report = score_all(gold, partitions[0])
    return TimingReport(
        runs=runs,
        mean_seconds=statistics.fmean(times),
        std_seconds=statistics.stdev(times) if runs > 1 else 0.0,
        conll_f1=report.conll_f1,
        similarity_evals=counter.similarity_evals,
        combine_ops=counter.combine_ops,
    )


DEFAULT_SWEEP_RATES = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class SweepRow:
    resolver: str
    kind: str
    rate: float
    theta: Optional[float]
    conll_f1: float
    delta_from_clean: float


def noise_sweep(
    corpus: Corpus,
    seed: int,
    resolver_ids: Sequence[str] = ("fuzzy",),
    rates: Sequence[float] = DEFAULT_SWEEP_RATES,
    kinds: Sequence[str] = ("boundary", "substitution"),
    grid_step: float = 0.01,
    car_resolver: Optional[Resolver] = None,
) -> list[SweepRow]:
    """Degradation curves over the noise grid.

    For the fuzzy resolver, theta is re-tuned on each noisy corpus (best
    achievable score per noise level). The embedding resolver runs with
    its fixed configuration through ``car_resolver``, which must accept
    any noisy corpus (the hash-embedding fallback does). Scoring is
    always against the unchanged gold partition. delta_from_clean is the
    first rate's F1 minus this rate's F1 within one (resolver, kind)
    curve; with the default grid the first rate is the clean corpus.
    """
    gold = gold_partition(corpus)
    rows: list[SweepRow] = []
    for resolver_id in resolver_ids:
        if resolver_id == "car" and car_resolver is None:
            raise ValueError("car sweep requested without a car_resolver")
        for kind in kinds:
            baseline: Optional[float] = None
            for rate in rates:
                noisy, _ = apply_noise(corpus, NoiseConfig(kind=kind, rate=rate, seed=seed))
                if resolver_id == "fuzzy":
                    tuned = tune_theta(noisy, grid_step)
                    theta: Optional[float] = tuned.best_theta
                    f1 = tuned.best_f1
                else:
                    theta = None
                    f1 = score_all(gold, car_resolver(noisy, None)).conll_f1
                if baseline is None:
                    baseline = f1
                rows.append(
                    SweepRow(
                        resolver=resolver_id,
                        kind=kind,
                        rate=rate,
                        theta=theta,
                        conll_f1=f1,
                        delta_from_clean=baseline - f1,
                    )
                )
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["resolver", "kind", "rate", "theta", "conll_f1", "delta_from_clean"])
        for row in rows:
            writer.writerow(
                [
                    row.resolver,
                    row.kind,
                    row.rate,
                    "" if row.theta is None else row.theta,
                    row.conll_f1,
                    row.delta_from_clean,
                ]
            )

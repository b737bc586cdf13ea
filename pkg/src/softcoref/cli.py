"""Command-line front door.

Subcommands: resolve {fuzzy,car}, score, tune, noise, stats, bench, and
noise-sweep. Every command that writes files also drops a manifest.json
in the output directory recording the command line, config, input
digests, tool version, and timestamp, so any run can be reproduced
byte-for-byte from its manifest. All file I/O is explicit via flags;
nothing is read from the environment.

Exit codes: 0 success, 1 data errors, 2 usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .analysis import (
    bench,
    compute_stats,
    noise_sweep,
    tune_theta,
    write_sweep_csv,
    write_tune_csv,
)
from .car import (
    CarConfig,
    DEFAULT_ALPHA,
    DEFAULT_DELTA,
    DEFAULT_MAX_CONTEXT,
    HASH_EMBED_DIM,
    coverage_gaps,
    hash_table_for,
    read_embedding_table,
    resolve_car,
)
from .errors import SoftcorefError
from .fuzzy import DEFAULT_THETA, FuzzyConfig, resolve_fuzzy
from .model import (
    gold_partition,
    read_corpus,
    read_partition,
    validate_corpus,
    write_corpus,
    write_partition,
)
from .noise import NoiseConfig, apply_noise
from .scoring import score_all, score_report_to_json

__all__ = ["build_parser", "main", "main_entry"]


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(out_path: Path, args: argparse.Namespace, inputs: list[Path]) -> None:
    config = {
        key: value
        for key, value in sorted(vars(args).items())
        if key != "func" and not isinstance(value, Path)
    }
    config.update(
        {key: str(value) for key, value in vars(args).items() if isinstance(value, Path)}
    )
    manifest = {
        "command": sys.argv[0].rsplit("/", 1)[-1] if sys.argv else "softcoref",
        "subcommand": getattr(args, "_subcommand", ""),
        "config": config,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    directory = out_path.parent if out_path.parent != Path("") else Path(".")
    with open(directory / "manifest.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2)
        handle.write("\n")


def _load_valid_corpus(path: Path):
    corpus = read_corpus(path)
    problems = validate_corpus(corpus)
    if problems:
        lines = "\n".join(f"  {v.kind} {v.subject}: {v.detail}" for v in problems[:20])
        raise SoftcorefError(f"corpus {path} is invalid:\n{lines}")
    return corpus


def _cmd_resolve_fuzzy(args) -> int:
    corpus = _load_valid_corpus(args.infile)
    partition = resolve_fuzzy(corpus, FuzzyConfig(theta=args.theta))
    write_partition(partition, args.out)
    _write_manifest(args.out, args, [args.infile])
    return 0


def _car_table(args, corpus):
    if args.embeddings is not None:
        table = read_embedding_table(args.embeddings)
        gaps = coverage_gaps(corpus, table)
        if gaps:
            raise SoftcorefError(
                f"embedding file {args.embeddings} lacks {len(gaps)} required key(s), "
                f"first: {gaps[0]!r}"
            )
        return table, [args.infile, args.embeddings]
    print("note: no --embeddings given; using the deterministic hash embedder", file=sys.stderr)
    return hash_table_for(corpus, HASH_EMBED_DIM), [args.infile]


def _cmd_resolve_car(args) -> int:
    corpus = _load_valid_corpus(args.infile)
    table, inputs = _car_table(args, corpus)
    config = CarConfig(
        alpha=args.alpha, delta=args.delta, max_context_sentences=args.max_context
    )
    partition = resolve_car(corpus, table, config)
    write_partition(partition, args.out)
    _write_manifest(args.out, args, inputs)
    return 0


def _cmd_score(args) -> int:
    key = read_partition(args.key)
    response = read_partition(args.response)
    report = score_all(key, response)
    text = score_report_to_json(report)
    if args.out is not None:
        args.out.write_text(text + "\n", encoding="utf-8")
        _write_manifest(args.out, args, [args.key, args.response])
    print(text)
    return 0


def _cmd_tune(args) -> int:
    corpus = _load_valid_corpus(args.infile)
    result = tune_theta(corpus, grid_step=args.grid_step)
    payload = json.dumps(result.to_dict(), indent=2)
    if args.out is not None:
        args.out.write_text(payload + "\n", encoding="utf-8")
        _write_manifest(args.out, args, [args.infile])
    if args.curve_csv is not None:
        write_tune_csv(result, args.curve_csv)
    print(payload)
    return 0


def _cmd_noise(args) -> int:
    corpus = _load_valid_corpus(args.infile)
    config = NoiseConfig(kind=args.kind, rate=args.rate, seed=args.seed)
    noisy, manifest = apply_noise(corpus, config)
    write_corpus(noisy, args.out)
    noise_manifest_path = args.out.parent / "noise_manifest.json"
    with open(noise_manifest_path, "w", encoding="utf-8") as handle:
        json.dump(manifest.to_dict(), handle, indent=2)
        handle.write("\n")
    _write_manifest(args.out, args, [args.infile])
    print(
        f"perturbed {len(manifest.targets) - len(manifest.skipped)} of "
        f"{len(corpus.mentions)} mentions ({len(manifest.skipped)} skipped)",
        file=sys.stderr,
    )
    return 0


def _cmd_stats(args) -> int:
    corpus = _load_valid_corpus(args.infile)
    stats = compute_stats(corpus, include_singletons=args.include_singletons)
    payload = json.dumps(stats.to_dict(), indent=2)
    if args.out is not None:
        args.out.write_text(payload + "\n", encoding="utf-8")
        _write_manifest(args.out, args, [args.infile])
    print(payload)
    return 0


def _cmd_bench(args) -> int:
    corpus = _load_valid_corpus(args.infile)
    gold = gold_partition(corpus)
    if args.resolver == "fuzzy":
        config = FuzzyConfig(theta=args.theta)
        resolver = lambda c, counter: resolve_fuzzy(c, config, counter)  # noqa: E731
        inputs = [args.infile]
    else:
        table, inputs = _car_table(args, corpus)
        car_config = CarConfig(
            alpha=args.alpha, delta=args.delta, max_context_sentences=args.max_context
        )
        resolver = lambda c, counter: resolve_car(c, table, car_config, counter)  # noqa: E731
    report = bench(resolver, corpus, gold, runs=args.runs)
    payload = json.dumps(report.to_dict(), indent=2)
    if args.out is not None:
        args.out.write_text(payload + "\n", encoding="utf-8")
        _write_manifest(args.out, args, inputs)
    print(payload)
    return 0


def _cmd_noise_sweep(args) -> int:
    corpus = _load_valid_corpus(args.infile)
    resolver_ids = ["fuzzy", "car"] if args.resolver == "both" else [args.resolver]
    car_resolver = None
    if "car" in resolver_ids:
        config = CarConfig(
            alpha=args.alpha, delta=args.delta, max_context_sentences=args.max_context
        )
        # noisy corpora contain forms no precomputed table covers, so the
        # sweep always embeds with the deterministic hash embedder
        print("note: car sweep uses the deterministic hash embedder", file=sys.stderr)
        car_resolver = lambda c, counter: resolve_car(  # noqa: E731
            c, hash_table_for(c, HASH_EMBED_DIM), config, counter
        )
    rows = noise_sweep(
        corpus,
        seed=args.seed,
        resolver_ids=resolver_ids,
        grid_step=args.grid_step,
        car_resolver=car_resolver,
    )
    write_sweep_csv(rows, args.out)
    _write_manifest(args.out, args, [args.infile])
    for row in rows:
        theta = "-" if row.theta is None else f"{row.theta:.2f}"
        print(
            f"{row.resolver:6s} {row.kind:12s} rate={row.rate:4.2f} theta={theta} "
            f"conll_f1={row.conll_f1:.4f} delta={row.delta_from_clean:+.4f}",
            file=sys.stderr,
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="softcoref",
        description="Cross-document software-mention coreference toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="_subcommand", required=True, metavar="command")

    def add_car_flags(p):
        p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA,
                       help="mention-vector weight in the combination (default 0.6)")
        p.add_argument("--delta", type=float, default=DEFAULT_DELTA,
                       help="clustering distance threshold (default 0.4)")
        p.add_argument("--max-context", type=int, default=DEFAULT_MAX_CONTEXT,
                       help="mention-bearing sentences per document context (default 10)")

    resolve = commands.add_parser("resolve", help="cluster a corpus")
    systems = resolve.add_subparsers(dest="_system", required=True, metavar="system")

    fuzzy = systems.add_parser("fuzzy", help="threshold-linked surface forms")
    fuzzy.add_argument("--in", dest="infile", type=Path, required=True)
    fuzzy.add_argument("--out", type=Path, required=True)
    fuzzy.add_argument("--theta", type=float, default=DEFAULT_THETA,
                       help="linking threshold (default 0.83)")
    fuzzy.set_defaults(func=_cmd_resolve_fuzzy)

    car = systems.add_parser("car", help="clustered context-aware embeddings")
    car.add_argument("--in", dest="infile", type=Path, required=True)
    car.add_argument("--out", type=Path, required=True)
    car.add_argument("--embeddings", type=Path, default=None,
                     help="embedding interchange file; omitted = hash-embedding fallback")
    add_car_flags(car)
    car.set_defaults(func=_cmd_resolve_car)

    score = commands.add_parser("score", help="score a response partition against a key")
    score.add_argument("--key", type=Path, required=True)
    score.add_argument("--response", type=Path, required=True)
    score.add_argument("--out", type=Path, default=None)
    score.set_defaults(func=_cmd_score)

    tune = commands.add_parser("tune", help="grid-search theta against gold labels")
    tune.add_argument("--in", dest="infile", type=Path, required=True)
    tune.add_argument("--grid-step", type=float, default=0.01)
    tune.add_argument("--out", type=Path, default=None)
    tune.add_argument("--curve-csv", type=Path, default=None,
                      help="also write the (theta, conll_f1) curve as CSV")
    tune.set_defaults(func=_cmd_tune)

    noise = commands.add_parser("noise", help="inject controlled mention noise")
    noise.add_argument("--in", dest="infile", type=Path, required=True)
    noise.add_argument("--out", type=Path, required=True)
    noise.add_argument("--kind", choices=["boundary", "substitution"], required=True)
    noise.add_argument("--rate", type=float, required=True)
    noise.add_argument("--seed", type=int, default=0)
    noise.set_defaults(func=_cmd_noise)

    stats = commands.add_parser("stats", help="corpus statistics over gold clusters")
    stats.add_argument("--in", dest="infile", type=Path, required=True)
    stats.add_argument("--include-singletons", action="store_true",
                       help="count singleton clusters at lexical similarity 1.0")
    stats.add_argument("--out", type=Path, default=None)
    stats.set_defaults(func=_cmd_stats)

    bench_cmd = commands.add_parser("bench", help="time a resolver end-to-end")
    bench_cmd.add_argument("--in", dest="infile", type=Path, required=True)
    bench_cmd.add_argument("--resolver", choices=["fuzzy", "car"], required=True)
    bench_cmd.add_argument("--runs", type=int, default=5)
    bench_cmd.add_argument("--theta", type=float, default=DEFAULT_THETA)
    bench_cmd.add_argument("--embeddings", type=Path, default=None)
    add_car_flags(bench_cmd)
    bench_cmd.add_argument("--out", type=Path, default=None)
    bench_cmd.set_defaults(func=_cmd_bench)

    sweep = commands.add_parser(
        "noise-sweep", help="degradation curves over both noise kinds and all rates"
    )
    sweep.add_argument("--in", dest="infile", type=Path, required=True)
    sweep.add_argument("--out", type=Path, required=True, help="CSV destination")
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--resolver", choices=["fuzzy", "car", "both"], default="fuzzy")
    sweep.add_argument("--grid-step", type=float, default=0.01)
    add_car_flags(sweep)
    sweep.set_defaults(func=_cmd_noise_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SoftcorefError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main_entry() -> None:
    raise SystemExit(main())

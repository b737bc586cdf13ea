"""Standalone command: embed --in corpus.jsonl --out vectors.jsonl."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import DEFAULT_MODEL, SidecarConfig, SidecarError, embed_corpus


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed",
        description="Encode a mention corpus into the embedding interchange format",
    )
    parser.add_argument("--in", dest="infile", type=Path, required=True)
    parser.add_argument("--out", type=Path, required=True)
    parser.add_argument("--model", default=DEFAULT_MODEL,
                        help=f"sentence encoder id (default {DEFAULT_MODEL})")
    parser.add_argument("--batch", type=int, default=64, help="encoder batch size")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    config = SidecarConfig(
        corpus_path=args.infile,
        out_path=args.out,
        model_id=args.model,
        batch_size=args.batch,
    )
    try:
        written = embed_corpus(config)
    except SidecarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(
        f"wrote {written['forms']} form vector(s) and {written['docs']} document vector(s) "
        f"to {args.out}",
        file=sys.stderr,
    )
    return 0


def main_entry() -> None:
    raise SystemExit(main())

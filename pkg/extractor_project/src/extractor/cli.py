"""Command-line entry point: TSV of sentences in, embedding file out."""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import ExtractorError
from .output import write_occurrences, write_report
from .pipeline import extract
from .records import read_occurrences_tsv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semshift-extract",
        description=(
            "Extract per-layer occurrence embeddings: read sentences with "
            "target-word character offsets, pool subword hidden states of a "
            "masked-language transformer, and write an occurrence-embedding file."
        ),
    )
    parser.add_argument("--input", required=True, help="TSV: word, period, occ_id, sentence, span_start, span_end")
    parser.add_argument("--model", required=True, help="model name or local path")
    parser.add_argument("--batch-size", type=int, default=8)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--binary-format", action="store_true", help="write the binary layout instead of JSON lines")
    parser.add_argument("--surface-match", action="store_true", help="skip occurrences whose span text differs from the word")
    parser.add_argument("--out", required=True, help="output occurrence-embedding file")
    parser.add_argument("--report", help="sidecar skip report (default: OUT.report.json)")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        occurrences = read_occurrences_tsv(args.input)
        if not occurrences:
            raise ExtractorError(f"no occurrences in {args.input}")
        if args.batch_size < 1:
            raise ExtractorError("--batch-size must be >= 1")
        processed, skipped = extract(
            occurrences,
            args.model,
            batch_size=args.batch_size,
            device=args.device,
            surface_match=args.surface_match,
        )
        if not processed:
            raise ExtractorError("every occurrence was skipped; nothing to write")
        write_occurrences(processed, args.out, binary=args.binary_format)
        write_report(skipped, len(processed), args.report or f"{args.out}.report.json")
    except ExtractorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(processed)} occurrences ({len(skipped)} skipped) to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

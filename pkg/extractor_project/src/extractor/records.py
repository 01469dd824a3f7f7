"""Input records: sentences with target-word character offsets."""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .errors import ParseError

_COLUMNS = ("word", "period", "occ_id", "sentence", "span_start", "span_end")


@dataclass(frozen=True)
class SentenceOccurrence:
    """One usage example: a sentence plus the target word's character span.

    The span is inclusive-exclusive (``sentence[span_start:span_end]`` is
    the surface form of the target). Offsets are trusted inputs; this
    module validates bounds but performs no lemmatization.
    """

    word: str
    period: str
    occ_id: str
    sentence: str
    span_start: int
    span_end: int

    def __post_init__(self):
        if not (0 <= self.span_start < self.span_end <= len(self.sentence)):
            raise ValueError(
                f"span [{self.span_start}, {self.span_end}) outside sentence "
                f"bounds [0, {len(self.sentence)}) for occurrence {self.occ_id!r}"
            )

    @property
    def span_text(self) -> str:
        return self.sentence[self.span_start : self.span_end]


def read_occurrences_tsv(path) -> list[SentenceOccurrence]:
    """Parse the input TSV: word, period, occ_id, sentence, span_start, span_end.

    A header row matching the column names is accepted and skipped.
    Raises ParseError with a file:line location on any malformed row.
    """
    out = []
    seen = set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
        for lineno, row in enumerate(reader, start=1):
            where = f"{path}:{lineno}"
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if lineno == 1 and tuple(row) == _COLUMNS:
                continue
            if len(row) != len(_COLUMNS):
                raise ParseError(
                    f"expected {len(_COLUMNS)} tab-separated fields, got {len(row)}", where
                )
            word, period, occ_id, sentence, start_s, end_s = row
            try:
                start, end = int(start_s), int(end_s)
            except ValueError as exc:
                raise ParseError(f"non-integer span offset: {exc}", where) from exc
            key = (word, period, occ_id)
            if key in seen:
                raise ParseError(f"duplicate occurrence id {occ_id!r} for {word!r}/{period!r}", where)
            seen.add(key)
            try:
                occ = SentenceOccurrence(word, period, occ_id, sentence, start, end)
            except ValueError as exc:
                raise ParseError(str(exc), where) from exc
            out.append(occ)
    return out

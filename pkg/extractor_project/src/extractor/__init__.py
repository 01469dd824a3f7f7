"""Occurrence-embedding extraction: masked-LM hidden states with subword pooling."""

from .errors import ExtractorError, ParseError, SpanTokenizationFailure
from .output import write_occurrences, write_report
from .pipeline import OccurrenceVectors, SkippedOccurrence, extract
from .records import SentenceOccurrence, read_occurrences_tsv

__version__ = "0.1.0"

__all__ = [
    "ExtractorError",
    "ParseError",
    "SpanTokenizationFailure",
    "OccurrenceVectors",
    "SkippedOccurrence",
    "SentenceOccurrence",
    "extract",
    "read_occurrences_tsv",
    "write_occurrences",
    "write_report",
    "__version__",
]

"""Error hierarchy for the extraction pipeline."""


class ExtractorError(Exception):
    """Base class for all extractor failures."""


class ParseError(ExtractorError):
    """Malformed input TSV; carries a file:line location."""

    def __init__(self, message: str, location: str):
        super().__init__(f"{location}: {message}")
        self.location = location


class SpanTokenizationFailure(ExtractorError):
    """The target character span maps to zero model tokens.

    Raised internally and converted to a skip + sidecar-report entry;
    it never aborts a run.
    """

    def __init__(self, occ_id: str, reason: str):
        super().__init__(f"occurrence {occ_id!r}: {reason}")
        self.occ_id = occ_id
        self.reason = reason

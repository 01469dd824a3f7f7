"""Exception types shared across the package."""


class SemshiftError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(SemshiftError):
    pass


class ZeroVector(SemshiftError):
    pass


class EmptyInput(SemshiftError):
    pass


class LayerOutOfRange(SemshiftError):
    pass


class MixedWordOrPeriod(SemshiftError):
    pass


class InconsistentDepth(SemshiftError):
    pass


class ParseError(SemshiftError):
    """Malformed input file; carries a human-readable location."""

    def __init__(self, message, location=None):
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location


class InvariantViolation(SemshiftError):
    pass


class Infeasible(SemshiftError):
    pass


class NumericalFailure(SemshiftError):
    pass


class TooFewPoints(SemshiftError):
    pass


class LengthMismatch(SemshiftError):
    pass


class ShapeMismatch(SemshiftError):
    pass


class MissingWord(SemshiftError):
    def __init__(self, word, period):
        super().__init__(f"word {word!r} missing from period {period!r}")
        self.word = word
        self.period = period


class VocabularyTooSmall(SemshiftError):
    pass


class NoUsableJudgments(SemshiftError):
    pass


class InsufficientData(SemshiftError):
    pass


class InsufficientOverlap(SemshiftError):
    pass


class DivisionDomain(SemshiftError):
    pass

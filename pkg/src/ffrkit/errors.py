"""Exception types shared across the toolkit."""


class FfrkitError(Exception):
    """Base class for all toolkit errors."""


# corpus
class MalformedRow(FfrkitError):
    pass


class LineCountMismatch(FfrkitError):
    pass


class InvalidUtf8(FfrkitError):
    pass


class EmptyCorpus(FfrkitError):
    pass


class SpecMismatch(FfrkitError):
    pass


class IoError(FfrkitError):
    pass


# tokenizer
class SequenceTooLong(FfrkitError):
    pass


# seq2seq
class ShapeMismatch(FfrkitError):
    pass


class AllMasked(FfrkitError):
    pass


class EmptyTarget(FfrkitError):
    pass


class NonFiniteGradient(FfrkitError):
    pass


# checkpoints
class BadMagic(FfrkitError):
    pass


class ShapeManifestMismatch(FfrkitError):
    pass


class TruncatedFile(FfrkitError):
    pass


# metrics
class LengthMismatch(FfrkitError):
    pass


class EmptyHypothesisSet(FfrkitError):
    pass


class DomainError(FfrkitError):
    pass


class NoScores(FfrkitError):
    pass


# cms service
class EmptyTask(FfrkitError):
    pass


class DuplicateItemId(FfrkitError):
    pass


class TaskComplete(FfrkitError):
    pass


class UnknownAnnotator(FfrkitError):
    pass


class UnknownTask(FfrkitError):
    pass


class UnknownItem(FfrkitError):
    pass


class OutOfRange(FfrkitError):
    pass


class PhaseViolation(FfrkitError):
    pass


class DuplicateSubmission(FfrkitError):
    pass


class CorruptLine(FfrkitError):
    def __init__(self, line_number: int, message: str = ""):
        self.line_number = line_number
        super().__init__(f"corrupt event log line {line_number}: {message}")

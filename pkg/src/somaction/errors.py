"""Exception types raised by the recognizer and its harness."""


class SomActionError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateSkeleton(SomActionError):
    """Hip joints coincide; the frame cannot be rescaled."""


class DegenerateTriangle(SomActionError):
    """Hips and torso are collinear; no egocentric basis exists."""


class EmptyTrainingSet(SomActionError):
    """An operation that fits parameters received no data."""


class DimensionMismatch(SomActionError):
    """Input vector dimensionality does not match the grid or layer."""


class EmptySequence(SomActionError):
    """A winner sequence or frame sequence was empty."""


class ZeroVector(SomActionError):
    """Cosine activation is undefined for a zero-norm vector."""


class UnknownLabel(SomActionError):
    """A label is not among the layer's configured labels."""


class EmptyWindow(SomActionError):
    """An action window contains no usable frames."""


class InconsistentObjectSet(SomActionError):
    """Object ids changed between frames of one action window."""


class MissingLabel(SomActionError):
    """A training window has no label attached."""


class UnbalancedMarks(SomActionError):
    """Stream start/end marks are not well nested."""


class MalformedRecord(SomActionError):
    """A stream line could not be parsed as a record.

    Carries the 1-based line number in ``line_no``.
    """

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ManifestMismatch(SomActionError):
    """Manifest rows do not align with the stream's action windows."""


class InvalidConfig(SomActionError):
    """Configuration values are out of range or inconsistent."""

"""Exception and warning types shared across the package."""


class TopicENAError(Exception):
    """Base class for all errors raised by this package."""


class PipelineStageError(TopicENAError):
    """Wraps an error raised inside a named pipeline stage."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")


# corpus
class EmptyDocument(TopicENAError):
    """No non-empty fragment survives segmentation."""


class MissingScore(TopicENAError):
    """Group derivation requested for a document without a score."""


class ScoreOutOfRange(TopicENAError):
    """Score falls in neither the low nor the high band."""


class ParseError(TopicENAError):
    """Input file violates its declared schema."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)


class DuplicateDocId(TopicENAError):
    """Two corpus records share a doc_id."""


# accumulation
class UnknownUtterance(TopicENAError):
    """A code row has no matching utterance."""


class EmptyGroup(TopicENAError):
    """No unit carries the requested group label."""


# projection
class RankDeficient(TopicENAError):
    """Centered unit matrix has lower rank than the requested dimension."""


class DegenerateMeans(TopicENAError):
    """Group means coincide; no rotation axis exists."""


class DimensionMismatch(TopicENAError):
    """Vector length does not match the fitted projection."""


# networks
class NodeSetMismatch(TopicENAError):
    """Graphs to subtract are defined over different node sets."""


class AllUnitsEmpty(TopicENAError):
    """Every unit has a zero adjacency vector; no layout objective exists."""


class MissingLayout(TopicENAError):
    """Rendering requested without a (>= 2)-dimensional node layout."""


# stats
class EmptySample(TopicENAError):
    """A rank test was given an empty sample."""


class TopicENAWarning(UserWarning):
    """Base class for warnings emitted by this package."""


class EmptyUnitWarning(TopicENAWarning):
    """A unit of analysis has no coded lines."""

"""Exception hierarchy for the CODP toolkit.

Every error raised on bad input derives from :class:`CodpError`, which is a
``ValueError`` so callers that only care about "bad input" can catch that.
"""


class CodpError(ValueError):
    """Base class for all domain errors."""


# production line construction
class EmptyLineError(CodpError):
    pass


class NonContiguousIndicesError(CodpError):
    pass


class FrontierOutOfRangeError(CodpError):
    pass


class NegativeFieldError(CodpError):
    def __init__(self, stage, field, value):
        self.stage = stage
        self.field = field
        self.value = value
        super().__init__(f"stage {stage}: field {field!r} has invalid value {value!r}")


class PositionOutOfRangeError(CodpError):
    pass


# curve fitting
class TooFewPointsError(CodpError):
    pass


class UnequalSpacingError(CodpError):
    pass


class NonPositiveDataError(CodpError):
    pass


class SingularSystemError(CodpError):
    pass


class DegenerateVarianceError(CodpError):
    pass


# inventory / costs
class OutOfRangeError(CodpError):
    pass


class ZeroTurnoverError(CodpError):
    pass


class FlagOutsideLineError(CodpError):
    pass


class OutOfFittedRangeError(CodpError):
    pass


# optimizer
class NoCandidatesError(CodpError):
    pass


class InfeasibleDeadlineError(CodpError):
    """No CODP position satisfies the delivery deadline.

    The attached ``verdict`` lets callers report the make-to-stock advisory.
    """

    def __init__(self, verdict):
        self.verdict = verdict
        super().__init__(
            f"deadline {verdict.deadline:g} is shorter than the minimum custom "
            f"lead time {verdict.min_custom_time:g}; produce the whole process to stock"
        )


# simulation
class InvalidConfigError(CodpError):
    pass


class MismatchedPlanError(CodpError):
    pass


# file input
class ParseError(CodpError):
    def __init__(self, line, column, reason):
        self.line = line
        self.column = column
        self.reason = reason
        super().__init__(f"line {line}, column {column}: {reason}")


class ValidationError(CodpError):
    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)

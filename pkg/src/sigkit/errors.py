"""Error taxonomy shared by every module.

The hierarchy mirrors the CLI exit codes: usage problems are
InvalidArgument (exit 1), anything wrong with the data itself is a
DataError subtype (exit 2), and a sample on which the requested
statistic is undefined is DegenerateSample (exit 3).
"""


class SigkitError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InvalidArgument(SigkitError):
    """A parameter is outside its documented domain, or flags conflict."""

    exit_code = 1


class DataError(SigkitError):
    """Input data violates its declared schema."""

    exit_code = 2


class EmptySample(DataError):
    """No usable examples remain after parsing/validation."""

    exit_code = 2


class InsufficientData(DataError):
    """The sample is too small for the requested procedure."""

    exit_code = 2


class DegenerateSample(SigkitError):
    """The statistic is undefined on this sample (e.g. zero-variance deltas)."""

    exit_code = 3

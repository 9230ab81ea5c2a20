"""Exception classes.

Every error that can reach the command line carries the exit code the CLI
reports for it.
"""


class ParallelMetricError(Exception):
    exit_code = 1


class InputParseError(ParallelMetricError):
    """The input could not be read as an instance or certificate."""

    exit_code = 2


class MetricStructureError(InputParseError):
    """A distance table is not square, has missing entries, or is not finite."""


class DuplicatePointError(ValueError):
    def __init__(self, i, j):
        super().__init__("points %d and %d coincide" % (i, j))
        self.pair = (int(i), int(j))


class EmptySetError(ValueError):
    pass


class ValidationFailed(ParallelMetricError):
    """Raised when a metric or partition fails validation.

    The full report is attached as ``report`` so callers can print every
    violation, not just the first.
    """

    exit_code = 3

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class CertificationFailed(ParallelMetricError):
    exit_code = 4

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class InternalConsistencyError(ParallelMetricError):
    """A property that holds for every valid input was found violated.

    Seeing this means there is a bug in the construction, not bad input.
    """

    exit_code = 5

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness

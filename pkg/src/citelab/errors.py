"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: usage problems exit 2 (argparse),
DataError/FetchError exit 3, MetricError exit 4.
"""


class CitelabError(Exception):
    """Base class for all citelab errors."""


class DataError(CitelabError):
    """Malformed or inconsistent input data (parse and validation failures)."""


class FetchError(CitelabError):
    """Remote corpus retrieval gave up (after retries; checkpoint saved)."""


class MetricError(CitelabError):
    """A metric was evaluated outside its mathematical domain."""


class ConvergenceError(MetricError):
    """An iterative solver hit its iteration cap.

    Carries the last residual so callers can decide whether to retry
    with a looser tolerance.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual

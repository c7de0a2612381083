"""Exception types raised by the library."""


class InvalidParameters(ValueError):
    """Distribution or scheme parameters outside their admissible range."""


class AssumptionViolated(RuntimeError):
    """An assumption integral failed to converge for the given profile."""


class AccuracyError(RuntimeError):
    """A quadrature failed its accuracy contract.

    ``estimate`` holds the error estimate that tripped the check, and
    ``where`` optionally names the grid node or corner involved.
    """

    def __init__(self, message: str, estimate: float = float("nan"), where=None):
        super().__init__(message)
        self.estimate = estimate
        self.where = where


class NotAvailable(LookupError):
    """A reference solution does not exist for the requested data."""

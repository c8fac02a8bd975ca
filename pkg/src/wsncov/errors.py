"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigurationError(ValueError):
    """Inconsistent or unsupported combination of options."""


class ConvergenceError(RuntimeError):
    """Adaptive quadrature ran out of subdivisions.

    The best estimate and its error bound are kept so callers can decide
    whether the partial result is still usable.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error

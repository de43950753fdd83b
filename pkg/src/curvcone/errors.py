"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    """Malformed input: wrong shape, broken symmetry, out-of-range index."""


class UnsupportedDimensionError(ValueError):
    """The operation is not defined in the requested dimension."""


class DomainError(ValueError):
    """Input lies outside the set where the quantity is defined."""


class IntegrationError(RuntimeError):
    """ODE integration produced a non-finite state.

    ``last_good`` holds the last accepted ``(t, mat)`` sample.
    """

    def __init__(self, message, last_good=None):
        super().__init__(message)
        self.last_good = last_good


class UnsupportedError(ValueError):
    """The request is well-formed but has no defined answer (e.g. no equality case)."""

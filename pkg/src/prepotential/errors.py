"""Exception and warning types shared across the package."""


class PrepotentialError(Exception):
    """Base class for all errors raised by this package."""


class CatalogError(PrepotentialError, KeyError):
    """Unknown system name."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ValidationError(PrepotentialError, ValueError):
    """Invalid parameter or configuration value."""


class DomainError(PrepotentialError, ValueError):
    """A point lies outside the validity region of a system."""


class PreconditionError(PrepotentialError, ValueError):
    """An operation was called on inputs that violate its contract."""


class SolverError(PrepotentialError, RuntimeError):
    """An iterative solver failed to converge.

    The best iterate found so far is attached as ``best`` together with the
    gradient norm there (``grad_norm``).
    """

    def __init__(self, message, best=None, grad_norm=None):
        super().__init__(message)
        self.best = best
        self.grad_norm = grad_norm


class ConvergenceError(PrepotentialError, RuntimeError):
    """Grid refinement did not converge; ``diagnostics`` holds the history."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class ConvergenceWarning(UserWarning):
    pass


class IllFitWarning(UserWarning):
    pass

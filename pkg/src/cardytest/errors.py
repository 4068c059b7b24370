"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateInputError(DomainError):
    """Input geometry is degenerate (coincident prevertices, vanishing gaps)."""


class PoleError(DomainError):
    """Evaluation point coincides with a pole of the map."""


class SolverError(RuntimeError):
    """An iterative solve did not converge.

    The best iterate and its residual are attached so callers can inspect
    or resume from them.
    """

    def __init__(self, message, best_iterate=None, residual=None, key=None):
        super().__init__(message)
        self.best_iterate = best_iterate
        self.residual = residual
        self.key = key


class ResourceError(RuntimeError):
    """A requested computation exceeds a configured hard cap."""

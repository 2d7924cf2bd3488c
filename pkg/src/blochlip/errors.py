"""Exception types shared across the package."""


class DomainError(ValueError):
    """A point lies outside the domain where an object is defined."""


class PoleError(ValueError):
    """An operator monotone function was evaluated at one of its poles."""


class NonConvergenceError(RuntimeError):
    """An iterative numerical procedure hit its cap without converging.

    ``last`` and ``previous`` hold the two most recent iterates so callers can
    judge how far from convergence the procedure stopped.
    """

    def __init__(self, message, last=None, previous=None):
        super().__init__(message)
        self.last = last
        self.previous = previous

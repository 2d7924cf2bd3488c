"""Weighted Bloch and Lipschitz numbers of mappings between normed spaces."""

from .errors import DomainError, NonConvergenceError, PoleError

__version__ = "0.1.0"

__all__ = ["DomainError", "NonConvergenceError", "PoleError", "__version__"]

"""Exception types raised across the package."""


class VibronError(Exception):
    """Base class for all package errors."""


class DomainError(VibronError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class ConvergenceError(VibronError, RuntimeError):
    """The tridiagonal eigensolver failed to converge on a block."""

    def __init__(self, message, block=None):
        super().__init__(message)
        self.block = block


class NumericalCheckError(VibronError, RuntimeError):
    """A post-solve residual or orthonormality check was violated."""


class DegeneracyError(VibronError, RuntimeError):
    """Two eigenvalues of one block coincide where the formula needs a gap."""

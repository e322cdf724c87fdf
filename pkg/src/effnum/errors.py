"""Exception types shared across the package.

The split mirrors the CLI exit-code contract: malformed or corrupt input
(exit 2), violated domain invariants such as a non-positive density matrix
(exit 3), and numerical non-convergence (exit 4).
"""


class EffnumError(Exception):
    """Base class for all package errors."""


class InvalidInput(EffnumError, ValueError):
    """Input fails validation (bad normalization, shape, file schema...)."""


class InvariantViolation(EffnumError, ValueError):
    """A domain invariant does not hold (non-Hermitian density matrix...)."""


class ConvergenceError(EffnumError, RuntimeError):
    """An iterative numerical procedure did not converge."""

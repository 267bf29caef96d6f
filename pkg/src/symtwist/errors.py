"""Exception types shared across the package.

The CLI maps these onto exit codes: :class:`VerificationError` -> 1,
:class:`MalformedInputError` -> 2, :class:`CapacityError` -> 3.
"""


class SymtwistError(Exception):
    """Base class for all package errors."""


class MalformedInputError(SymtwistError, ValueError):
    """Input data is structurally invalid (bad modulus, wrong shapes, ...)."""


class NotInvertibleError(SymtwistError, ArithmeticError):
    """An inverse was requested for a non-unit."""


class CapacityError(SymtwistError):
    """A computation would exceed the enumeration or size bound."""


class VerificationError(SymtwistError):
    """A mathematical check failed; ``residual`` carries the evidence."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual

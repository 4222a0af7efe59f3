"""Exception hierarchy for lnsfp8."""

from __future__ import annotations


class Fp8Error(Exception):
    """Base class for all lnsfp8 errors."""


class FieldRangeError(Fp8Error, ValueError):
    """A field value does not fit its bit width."""


class UnsupportedClassError(Fp8Error, ValueError):
    """Operand is zero, subnormal or in the maximum-exponent binade."""


class DomainError(Fp8Error, ValueError):
    """Operation undefined for the operand (division by zero, sqrt of a negative, ...)."""


class OutOfRangeError(Fp8Error, ArithmeticError):
    """Correctly rounded result is not a normal number of the format.

    ``direction`` is ``"overflow"`` or ``"underflow"``.
    """

    def __init__(self, direction: str, message: str | None = None):
        self.direction = direction
        super().__init__(message or f"result {direction}s the normal range")


class UnsupportedModeError(Fp8Error, ValueError):
    """The (operation, format, rounding mode) cell has no integer expression."""

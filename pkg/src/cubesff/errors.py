"""Exception types shared across the package.

Every guard failure raises one of these; nothing is signalled through
return values.
"""


class CubesError(Exception):
    """Base class for all package errors."""


class NotPrime(CubesError):
    pass


class CharIsThree(CubesError):
    pass


class TooLarge(CubesError):
    """An enumeration or table would exceed the configured cap."""


class NoCubicCharacter(CubesError):
    """Raised when q is not 1 mod 3."""


class NotASubfield(CubesError):
    pass


class DivisionByZero(CubesError, ZeroDivisionError):
    pass


class NotCoprime(CubesError):
    pass


class ZeroModulus(CubesError):
    pass


class NotFoundWithin(CubesError):
    """Search bound exhausted; the object exists further out."""

    def __init__(self, bound, message=None):
        self.bound = bound
        super().__init__(message or f"not found within bound {bound}")


class FactorizationCapExceeded(CubesError):
    pass


class ZeroDensityClass(CubesError):
    """A residue class with no solutions; surfaced, never averaged over."""


class InsufficientPrecision(CubesError):
    """A truncated series window is too shallow to decide an indicator."""


class SizeMismatch(CubesError):
    pass


class ModulusTooLarge(CubesError):
    """An exact-identity hypothesis on |N| is violated."""


class ConfigInvalid(CubesError):
    pass


class CapExceeded(CubesError):
    def __init__(self, dimension, value, cap):
        self.dimension = dimension
        self.value = value
        self.cap = cap
        super().__init__(f"cap exceeded for {dimension}: {value} > {cap}")

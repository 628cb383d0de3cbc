"""Exception types raised by quatspec."""


class QuatDomainError(ValueError):
    """An argument lies outside the domain of the operation (zero inverse, non-unit rotor, ...)."""


class ShapeMismatchError(ValueError):
    """Operand shapes are incompatible."""


class OracleSizeError(ValueError):
    """The brute-force oracle was asked to materialize an operator above its size guard."""

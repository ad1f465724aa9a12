"""Exception hierarchy.

``ValidationError`` subclasses map to CLI exit code 2, ``ContractViolation``
subclasses to exit code 3.
"""

from __future__ import annotations


class StarvalError(Exception):
    pass


class ValidationError(StarvalError, ValueError):
    """Bad input: parameters, dimensions, specs."""


class InvalidDimensionError(ValidationError):
    pass


class DimensionMismatchError(ValidationError):
    pass


class UnsupportedSchemeError(ValidationError):
    pass


class ParameterError(ValidationError):
    pass


class InvalidScaleError(ParameterError):
    pass


class InsufficientBudgetError(ParameterError):
    pass


class DomainExceededError(ValidationError):
    """A radial value fell outside the domain [0, M] on which theta is declared."""

    def __init__(self, message: str, value: float | None = None, bound: float | None = None):
        super().__init__(message)
        self.value = value
        self.bound = bound


class SpecError(ValidationError):
    """Malformed body/theta spec; ``path`` is a JSON-pointer to the offending node."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path or "/"


class ContractViolation(StarvalError):
    """A numerical contract did not hold."""


class NonFiniteIntegrandError(ContractViolation):
    def __init__(self, message: str, node=None, index: int | None = None):
        super().__init__(message)
        self.node = node
        self.index = index


class MalformedBodyError(ContractViolation):
    pass


class ReportError(ContractViolation):
    pass

from __future__ import annotations


class OrbitCertError(Exception):
    """Base class for every error raised by the toolkit."""


class ConfigurationError(OrbitCertError, ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class DimensionError(OrbitCertError, ValueError):
    pass


class DomainError(OrbitCertError, ValueError):
    pass


class NumericError(OrbitCertError, ArithmeticError):
    pass


class UnsupportedModelError(OrbitCertError):
    pass


class ArgumentError(OrbitCertError, ValueError):
    pass


class NotSubspaceError(ArgumentError):
    pass


class NotClosedError(ArgumentError):
    pass


class PreconditionError(OrbitCertError):
    pass


class InternalError(OrbitCertError, RuntimeError):
    pass

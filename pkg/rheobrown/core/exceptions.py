"""
Error hierarchy for rheobrown.

The CLI maps these onto exit codes: configuration and parameter problems
exit with 2, numerical divergence with 3, failed verification with 4.
"""

from typing import List, Optional


class RheoBrownError(Exception):
    """Base class for all errors raised by the package."""


class ParameterError(RheoBrownError, ValueError):
    """A physical or numerical parameter violates a documented invariant."""


class GridError(ParameterError):
    """A time or frequency grid is not of the required shape."""


class IndefiniteCovarianceError(ParameterError):
    """A covariance sequence has a significantly negative spectrum."""


class PoleError(RheoBrownError, ArithmeticError):
    """A complex modulus vanishes where its reciprocal is required."""

    def __init__(self, message: str, omega: Optional[float] = None):
        super().__init__(message)
        self.omega = omega


class UnsupportedTopologyError(RheoBrownError):
    """No closed form exists for the requested network topology."""


class ConfigError(RheoBrownError):
    """A run configuration is malformed or internally inconsistent."""


class DivergenceError(RheoBrownError):
    """A trajectory integration blew up."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class VerificationError(RheoBrownError):
    """One or more verification checks failed."""

    def __init__(self, message: str, failed: Optional[List[str]] = None):
        super().__init__(message)
        self.failed = failed or []

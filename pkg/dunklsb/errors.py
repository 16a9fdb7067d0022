"""
Exceptions and warnings raised by dunklsb.
"""

from typing import Optional


class DunklError(Exception):
    """Base class for all dunklsb errors."""


class ConvergenceError(DunklError):
    """A series, eigen-solve or SVD iteration did not converge."""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class DimensionMismatchError(DunklError, ValueError):
    """Arguments live in spaces of different dimension."""


class QuadratureError(DunklError):
    """A quadrature integrand could not be evaluated at some node."""

    def __init__(self, message: str, node_index: Optional[int] = None):
        super().__init__(message)
        self.node_index = node_index


class RuleSizeError(DunklError, ValueError):
    """A tensor quadrature rule would exceed the node budget."""


class RankDeficiencyError(DunklError):
    """A polar factor was requested for a numerically singular matrix."""

    def __init__(self, message: str, sigma_min: Optional[float] = None):
        super().__init__(message)
        self.sigma_min = sigma_min


class UnsupportedParameterError(DunklError, ValueError):
    """An operator was requested outside the parameter range it is defined for."""


class NumericalWarning(UserWarning):
    """Advisory about accuracy: series tails, node span, truncation leaks."""

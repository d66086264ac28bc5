"""Exception hierarchy for hydrospec.

Every error raised on purpose derives from :class:`HydrospecError`. Most also
derive from the closest builtin so that generic ``except ValueError`` code keeps
working.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from src.densela.qz import QZResult


class HydrospecError(Exception):
    """Base class for all hydrospec errors."""


class InvalidPrecisionError(HydrospecError, ValueError):
    """Raised for a significand width below two bits."""


class ContextMismatchError(HydrospecError, TypeError):
    """Raised when operands carry different precision contexts."""


class ArithmeticDomainError(HydrospecError, ZeroDivisionError):
    """Raised on division by an exact zero."""


class DecimalParseError(HydrospecError, ValueError):
    """Raised when a decimal string cannot be parsed into a finite value."""


class ShapeError(HydrospecError, ValueError):
    """Raised for non-square or mismatched matrix operands."""


class SingularPencilError(HydrospecError):
    """Raised when a pencil produces alpha = beta = 0 (det(A - cB) vanishes identically)."""


class ConvergenceError(HydrospecError):
    """Raised when the QZ iteration exhausts its sweep budget.

    The ``result`` attribute holds the non-converged :class:`QZResult` so the
    caller can inspect how far the iteration got.
    """

    def __init__(self, msg: str, result: QZResult) -> None:
        super().__init__(msg)
        self.result = result


class ConfigurationError(HydrospecError, ValueError):
    """Raised for invalid run parameters (N too small, bad sweep bounds, ...)."""


class EmptySetError(HydrospecError, ValueError):
    """Raised when a Hausdorff distance is requested for an empty point set."""


class FitError(HydrospecError, ValueError):
    """Raised when a convergence rate cannot be fitted."""


class ReferenceMissingError(HydrospecError, FileNotFoundError):
    """Raised when a reference spectrum file does not exist."""

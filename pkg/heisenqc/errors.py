"""
Exception hierarchy shared by all subpackages.

Library code raises these; `heisenqc.core.command_error` turns them into
messages and exit codes at the command-line boundary.
"""

from __future__ import annotations


class HeisenQCError(Exception):
    """Base class for toolkit errors."""


class DomainError(HeisenQCError, ValueError):
    """An argument lies outside the domain of an operation."""


class ConfigError(HeisenQCError, ValueError):
    """Configuration failed schema or semantic validation."""


class EvaluationError(HeisenQCError, ArithmeticError):
    """A field produced non-finite values."""


class SingularityError(EvaluationError):
    """Non-finite derivatives on a sampling grid."""

    def __init__(self, message: str, points=None):
        super().__init__(message)
        self.points = points


class IntegrabilityError(HeisenQCError):
    """Radial partial sums failed to settle."""

    def __init__(self, message: str, partial_sums=None):
        super().__init__(message)
        self.partial_sums = partial_sums


class QuadratureError(HeisenQCError):
    """A quadrature produced unusable output."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class FlowEscapeError(HeisenQCError):
    """A trajectory left the admissible region."""

    def __init__(self, message: str, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class PoleError(DomainError):
    """Evaluation at a pole of the log kernel."""


class BoundDivergesError(HeisenQCError):
    """The dilatation budget has no finite solution."""


class IterationAborted(HeisenQCError):
    """The iteration stopped early; `report` holds the completed steps."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class InvariantFailure(HeisenQCError):
    """A verification check did not hold."""

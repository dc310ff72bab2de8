# core/exceptions.py
"""
Error taxonomy shared by the numerical modules and the management commands.
"""


class CrouzeixError(Exception):
    """Base class for every failure raised by the verification library."""


class InvalidInputError(CrouzeixError, ValueError):
    """Malformed input: wrong shape, non-finite entries, non-Hermitian data..."""


class DegenerateInputError(CrouzeixError):
    """The input is valid but carries no information (e.g. the zero matrix)."""


class SingularShiftError(CrouzeixError):
    """A shift tau hits (numerically) the spectrum of the matrix."""

    def __init__(self, message, distance=None):
        super().__init__(message)
        self.distance = distance


class UnboundedPsiError(CrouzeixError):
    """The disk bound is +infinity (product of the weights larger than 1)."""


class GeometryError(CrouzeixError):
    """The numerical range is degenerate or 0 is not an interior point."""


class MapFailureError(CrouzeixError):
    """The boundary-correspondence iteration did not converge."""

    def __init__(self, message, defect=None):
        super().__init__(message)
        self.defect = defect


class DomainError(CrouzeixError):
    """A map was evaluated outside of its domain."""


class InversionError(CrouzeixError):
    """Newton inversion of the disk map diverged."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SingularFactorError(CrouzeixError):
    """A Blaschke factor (I - conj(a) A) could not be inverted."""


class ReportError(CrouzeixError):
    """A pipeline stage failed; `report` holds the fields computed so far."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}

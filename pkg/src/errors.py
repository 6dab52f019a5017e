"""Exception hierarchy shared by every module of the toolkit."""


class LogConnError(Exception):
    """Base class for all errors raised by the toolkit."""


class DomainError(LogConnError, ValueError):
    """An arithmetic or domain violation (division by zero, zero function, pole at a point)."""


class InvalidInstanceError(DomainError):
    """A curve instance violates one of its defining constraints."""


class PreconditionError(DomainError):
    """An operation was called outside of its documented domain."""


class IncidenceVarietyError(PreconditionError):
    """A parabolic direction coincides with its partner (z_i = zeta_i)."""


class IncidencePoleError(PreconditionError):
    """The pairing a.b vanishes, so the primitive of the symplectic form has a pole."""


class NotLogarithmicError(DomainError):
    """A connection matrix has a pole of order two or more at a point."""


class NonGenericResidueError(DomainError):
    """A residue matrix has a repeated eigenvalue."""


class EigenvaluesOutsideFieldError(DomainError):
    """The eigenvalues of a residue matrix are not in the coefficient field."""


class UnsupportedLocusError(DomainError):
    """Zeros or poles lie over points that cannot be represented exactly."""


class EpsilonFieldRequiredError(DomainError):
    """A chart coordinate vanishes and must be replaced by the formal parameter eps."""


class BlownUpPointError(DomainError):
    """The Bun' map is evaluated at the point it blows up."""


class TranscriptionError(LogConnError):
    """A closed formula disagrees with the first-principles computation."""

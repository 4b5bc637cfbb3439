"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class KLError(Exception):
    """Base class for all package errors."""


class PreconditionError(KLError, ValueError):
    """An input violates a documented precondition (bad strip, bad alpha, ...)."""


class PoleError(PreconditionError):
    """Evaluation requested exactly at a pole."""


class DomainError(PreconditionError):
    """Argument outside the supported domain."""


class NonIntegrableError(PreconditionError):
    """The requested integral does not exist for this input."""


class TailModelError(PreconditionError):
    """Decay of the supplied data is too slow for the inversion integral."""


class BoundConstraintError(PreconditionError):
    """Parameters outside the admissible range of a norm inequality."""


class ConvergenceError(KLError):
    """A numerical procedure could not reach its tolerance.

    Raised only where the caller asked for strict behaviour; most routines
    instead report ``converged=False`` in their result records.
    """


class IntegrandError(KLError, ValueError):
    """The integrand returned NaN or inf at a sample point."""

"""Exception hierarchy shared by every module."""

from __future__ import annotations


class BCBError(Exception):
    """Base class for all errors raised by this package."""


class DegeneracyError(BCBError):
    """A genericity hypothesis failed; the requested answer is not defined."""


class EigOneDegenerate(DegeneracyError):
    pass


class EigMinusOneDegenerate(DegeneracyError):
    pass


class EigOneDegenerateRL(DegeneracyError):
    pass


class NondegeneracyViolated(DegeneracyError):
    pass


class DegenerateEndpoint(DegeneracyError):
    pass


class DegenerateDeterminant(DegeneracyError):
    pass


class Degenerate(DegeneracyError):
    """Raised by the classifier; ``violations`` names every failed hypothesis."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NoConvergence(BCBError):
    pass


class InternalConsistencyError(BCBError):
    """Two independent routes to the same quantity disagreed.

    This can only happen through an implementation bug, so the full
    witness is attached for debugging.
    """

    def __init__(self, message: str, witness: dict | None = None):
        self.witness = dict(witness or {})
        detail = "".join(f"\n  {k} = {v!r}" for k, v in self.witness.items())
        super().__init__(message + detail)


class ProblemFileError(BCBError):
    pass

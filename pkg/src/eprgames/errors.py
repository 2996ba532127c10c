"""Exception hierarchy shared by every module.

The CLI maps ``EprGamesError`` subclasses to exit code 1 and prints a
machine-readable payload built from ``kind`` and the message.
"""

from __future__ import annotations


class EprGamesError(Exception):
    """Base class for domain errors."""

    kind = "domain_error"

    def to_dict(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class DomainError(EprGamesError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    kind = "domain_error"


class InconsistentStatsError(EprGamesError, ValueError):
    """Four-coin statistics fail the bilinear consistency relations."""

    kind = "inconsistent_stats"

    def __init__(self, message: str, residuals: dict[str, float] | None = None):
        super().__init__(message)
        self.residuals = dict(residuals or {})

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["residuals"] = self.residuals
        return out


class PreconditionError(EprGamesError, ValueError):
    """A measure does not satisfy the perfect-correlation preconditions."""

    kind = "precondition"


class BranchError(PreconditionError):
    """The p1 = 1 branch is not selected (m1 + m2 + m3 + m4 != 1)."""

    kind = "branch"


class NoEquilibriumError(EprGamesError):
    """An analytic equilibrium formula has no solution for these inputs."""

    kind = "no_solution"


class InsufficientDataError(EprGamesError):
    """A correlation was requested for an axis pair that never occurred."""

    kind = "insufficient_data"

"""Typed errors shared across the package.

Every contract violation raises a subclass of :class:`OTLabError` so callers
(and the command-line layer) can map failures to exit codes without string
matching.
"""

__all__ = [
    "OTLabError",
    "InvalidSpaceError",
    "SpaceMismatchError",
    "InvalidMeasureError",
    "CouplingError",
    "SolverStallError",
    "BudgetError",
    "DomainError",
    "InvariantError",
    "FiberCollisionError",
    "ParseError",
]


class OTLabError(Exception):
    """Base class for all library errors."""


class InvalidSpaceError(OTLabError):
    """A metric space failed construction-time validation."""


class SpaceMismatchError(OTLabError):
    """A point or measure does not belong to the space it was used with."""


class InvalidMeasureError(OTLabError):
    """Atom masses violate positivity, the mass floor, or normalization."""


class CouplingError(OTLabError):
    """A coupling violates nonnegativity or its marginal constraints."""


class SolverStallError(OTLabError):
    """The transportation simplex exceeded its pivot budget.

    Carries partial diagnostics so a stall is debuggable rather than silent.
    """

    def __init__(self, message, *, pivots=None, current_cost=None):
        super().__init__(message)
        self.pivots = pivots
        self.current_cost = current_cost


class BudgetError(OTLabError):
    """A combinatorial search would exceed its configured budget."""


class DomainError(OTLabError):
    """An argument lies outside the mathematical domain of the operation."""


class InvariantError(OTLabError):
    """A checked mathematical postcondition failed beyond tolerance."""


class FiberCollisionError(OTLabError):
    """A fiber-injective operation received atoms sharing a base point.

    ``atoms`` names the colliding atoms.
    """

    def __init__(self, message, *, atoms=()):
        super().__init__(message)
        self.atoms = tuple(atoms)


class ParseError(OTLabError):
    """A text input failed to parse; carries file position information."""

    def __init__(self, message, *, path=None, line=None, column=None):
        loc = ""
        if path is not None:
            loc = f"{path}:"
        if line is not None:
            loc += f"{line}:"
        if column is not None:
            loc += f"{column}:"
        super().__init__(f"{loc} {message}" if loc else message)
        self.path = path
        self.line = line
        self.column = column

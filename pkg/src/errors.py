"""Exception types raised by the thickset library.

Every public failure is a ThicksetError so callers (and the CLI) can
catch one type. Budget exhaustion is internal and never escapes a
classifier: it is turned into an "undecided" status.
"""

from __future__ import annotations


class ThicksetError(ValueError):
    """Base class for all library errors."""


class GroupDefinitionError(ThicksetError):
    """A group or G-space table does not satisfy the axioms."""

    def __init__(self, message: str, report: object | None = None):
        super().__init__(message)
        self.report = report


class CarrierError(ThicksetError):
    """Sets, measures or homomorphisms live on incompatible carriers."""


class WindowOverflowError(ThicksetError):
    """An operation produced a vector outside the finite horizon."""


class PreconditionError(ThicksetError):
    """A documented precondition of an operation does not hold."""


class CertificateError(ThicksetError):
    """A produced or loaded certificate failed its replay check."""


class SetSpecError(ThicksetError):
    """A set description could not be parsed or resolved."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class BudgetExceeded(Exception):
    """Raised inside a search when the candidate budget runs out."""

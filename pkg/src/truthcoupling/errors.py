"""Exception hierarchy shared by every module.

All errors derive from :class:`ModelError` (itself a ``ValueError``) so callers
can catch the family in one place; the CLI maps them onto exit codes.
"""


class ModelError(ValueError):
    """Base class for invalid inputs to the model."""


class DomainError(ModelError):
    """A parameter lies outside the domain where a quantity is defined."""


class InsufficientDataError(ModelError):
    """Too few observations for an estimator."""


class DegenerateSignalError(ModelError):
    """An estimator would divide by a zero variance."""


class FormatError(ModelError):
    """Malformed input file or series."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)

"""Exception types shared across the package."""


class MultiemoError(Exception):
    """Base class for all multiemo errors."""


class SchemaError(MultiemoError):
    """A file or in-memory structure violates its declared schema."""


class AlignmentError(MultiemoError):
    """Row, column, or id alignment between two structures failed."""


class DegenerateInputError(MultiemoError):
    """Metric input is degenerate (e.g. no positive or no negative cells)."""


class BudgetError(MultiemoError):
    """A generation budget cannot be met under the configured retry cap."""

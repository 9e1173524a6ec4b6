"""Exception hierarchy shared by the reserving modules."""


class ReservingError(ValueError):
    """Base class for all library errors."""


class ParseError(ReservingError):
    """Malformed CSV input. Carries 1-based ``row`` and ``column`` indices."""

    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column


class ShapeError(ReservingError):
    """Triangle is ragged, non-triangular, or too small."""


class ValidationError(ReservingError):
    """A value violates a positivity or range constraint."""


class UnsupportedShapeError(ReservingError):
    """The triangle is valid but too small for the requested computation."""


class DomainError(ReservingError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(ReservingError):
    """Invalid simulation configuration."""


class SimulationError(ReservingError):
    """A simulation study could not be completed."""

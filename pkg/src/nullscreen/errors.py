"""Exception hierarchy shared across the package."""


class GeometryError(Exception):
    """Base class for every error raised by this package."""


class ContractError(GeometryError):
    """An input violates a documented precondition."""


class DomainError(GeometryError):
    """A point lies outside the domain of a function or model."""


class EvaluationError(GeometryError):
    """A numerical evaluation produced a non-finite value."""


class FocalPointError(GeometryError):
    """The chart differential lost rank (a focal point was reached)."""


class ConfigError(GeometryError):
    """A run configuration could not be parsed or validated."""

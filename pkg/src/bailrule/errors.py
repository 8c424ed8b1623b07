"""Exception types shared across the package."""


class BailruleError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(BailruleError, ValueError):
    """A value lies outside its admissible domain."""


class NumericalInconsistencyError(BailruleError, RuntimeError):
    """A numerical precondition failed that the inputs' declared properties
    should have guaranteed (e.g. a root bracket that does not bracket)."""


class PiecewiseRegimeError(BailruleError, ValueError):
    """A closed-form expression was requested outside the parameter regime
    where it is valid; callers should fall back to numeric differentiation."""


class EstimationError(BailruleError, RuntimeError):
    """The data do not identify the requested fit."""


class ConfigError(BailruleError, ValueError):
    """A configuration file failed to parse or validate."""


class DataError(BailruleError, ValueError):
    """An episode data file violated the CSV contract."""

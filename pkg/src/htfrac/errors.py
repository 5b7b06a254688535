"""Exception and warning types shared by the package."""


class HtfracError(Exception):
    """Base class for every error raised by htfrac."""


class InvalidInputError(HtfracError, ValueError):
    """Malformed arguments: wrong dimensions, non-positive radii, bad ranges."""


class DomainError(HtfracError, ValueError):
    """A special function or constant was requested outside its domain."""


class UnsupportedFeatureError(HtfracError, NotImplementedError):
    """The request is well defined but deliberately not implemented."""


class PreconditionError(HtfracError, ValueError):
    """A field does not carry the regularity or decay an evaluator needs."""


class SingularityError(HtfracError, ValueError):
    """Evaluation exactly at a kernel singularity."""


class DivergenceError(HtfracError, ArithmeticError):
    """An integral was detected (or declared) to diverge."""


class CalibrationError(HtfracError, RuntimeError):
    """Independent estimators of a calibrated constant disagree."""


class ConfigError(HtfracError, ValueError):
    """Bad run configuration (syntax, unknown keys, invalid ranges)."""


class PrecisionWarning(UserWarning):
    """Finite precision makes a requested step or tolerance meaningless."""

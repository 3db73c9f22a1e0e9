"""Exception hierarchy.

Errors fall into two big families the CLI cares about: configuration
problems (bad config file, invalid model parameters, exit code 2) and
numerical guards tripping at run time (exit code 3).
"""


class NonharmonicError(Exception):
    """Base class for all library errors."""


class ConfigurationError(NonharmonicError):
    """Invalid model spec, config file, or parameter block."""


class ShapeError(NonharmonicError):
    """Grid function or coefficient vector with the wrong length."""


class TagError(NonharmonicError):
    """Coefficient vector used with the wrong transform tag."""


class NumericalConsistencyError(NonharmonicError):
    """A quantity that must be (near-)real or nonnegative is not."""


class WZViolationError(NonharmonicError):
    """An eigenfunction value too close to zero for symbol extraction."""


class AdmissibilityError(NonharmonicError):
    """The difference family q fails an admissibility requirement."""


class WindowExhaustedError(NonharmonicError):
    """A symbol was read outside its valid extended index window."""


class EllipticityError(NonharmonicError):
    """A symbol fails the invertibility / ellipticity precheck."""


class SpectrumProximityError(NonharmonicError):
    """A shift z is on or numerically too close to the spectrum."""


class BranchCutError(NonharmonicError):
    """Principal power evaluated on the branch cut Re a <= 0, Im a = 0."""


class PicardDivergenceError(NonharmonicError):
    """Fixed-point iteration residuals grew too many times in a row."""


#: Guard errors that map to CLI exit code 3 (numerical error).
GUARD_ERRORS = (
    ShapeError,
    TagError,
    NumericalConsistencyError,
    WZViolationError,
    AdmissibilityError,
    WindowExhaustedError,
    EllipticityError,
    SpectrumProximityError,
    BranchCutError,
    PicardDivergenceError,
)

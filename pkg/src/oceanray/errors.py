"""Exception hierarchy shared by all oceanray modules.

Domain errors derive from :class:`OceanrayError`; the CLI maps them to exit
status 1, while :class:`ConfigError` maps to exit status 2.
"""


class OceanrayError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidArgumentError(OceanrayError, ValueError):
    """An argument violates a documented precondition."""


class SingularDenominatorError(OceanrayError):
    """The effective potential was evaluated at a resonant latitude."""


class ForbiddenRegionError(OceanrayError):
    """A bracket search was started where the potential is negative."""


class NotPeriodicError(OceanrayError):
    """A period or periodic-criterion quadrature needs two simple turning points."""


class PathologicalClassError(OceanrayError):
    """Drift diagnostics are defined only for periodic or asymptotic motions."""


class InsufficientTailError(OceanrayError):
    """Asymptotic-rate fitting needs at least a decade of late-time samples."""


class BelowThresholdError(OceanrayError):
    """The frequency is below the sublevel-set threshold of the rho function."""


class OutOfWindowError(OceanrayError):
    """A seed latitude lies outside the admissible window for trapped seeds."""


class NoTurningPointsError(OceanrayError):
    """No turning points bracket the requested oscillation."""


class BelowWellError(OceanrayError):
    """An action integral was requested below the bottom of the well."""


class MultiWellError(OceanrayError):
    """The squared Coriolis profile has more than one well at this energy."""


class ComplexRootsError(OceanrayError):
    """The dispersion cubic has complex roots for these parameters."""


class ConfigError(OceanrayError):
    """The run configuration is malformed (unknown keys, bad types, bad values)."""

"""Exception and warning types shared across the package."""


class SuvlabError(Exception):
    """Base class for all suvlab errors."""


class InvalidStateError(SuvlabError):
    """A quantum state is degenerate or outside its domain."""


class SolverBlowupError(SuvlabError):
    """An integrator produced a zero-norm or non-finite state."""


class IllDefinedRatioError(SuvlabError):
    """The drift uses the ratio G/J, which is undefined for J = 0 with G > 0."""


class HorizonTooShortError(SuvlabError):
    """Too many trajectories failed to resolve before the time horizon."""


class NormalizationError(SuvlabError):
    """A wavefunction or field is not normalized within tolerance."""


class UnsupportedPotentialError(SuvlabError):
    """The potential degree exceeds what this release supports (quadratic)."""


class CflViolationError(SuvlabError):
    """The requested timestep violates the advective CFL stability bound."""


class ConfigError(SuvlabError):
    """A run configuration failed to parse or validate."""


class UnderResolvedNoiseWarning(UserWarning):
    """The timestep exceeds the noise correlation time."""


class GridTooSmallWarning(UserWarning):
    """Boundary outflow exceeded the mass-loss monitoring threshold."""

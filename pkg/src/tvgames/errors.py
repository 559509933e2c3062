"""Exception types shared across the package."""


class TvgamesError(Exception):
    """Base class for all library errors."""


class NonSquareError(TvgamesError):
    """A square matrix was required."""


class DimensionTooLargeError(TvgamesError):
    """Matrix dimension exceeds the dense-solver cap."""


class SolverFailureError(TvgamesError):
    """A dense decomposition did not converge or missed its accuracy target."""


class WrongScheduleKindError(TvgamesError):
    """Operation applied to a schedule kind it does not support."""


class DimensionMismatchError(TvgamesError):
    """State, payoff, or config dimensions are inconsistent."""


class IndexOutOfPeriodError(TvgamesError):
    """Period index outside 1..T."""


class InsufficientSamplesError(TvgamesError):
    """Not enough usable samples for a rate fit."""


class NonPositiveSamplesError(TvgamesError):
    """Rate-fit window contains zero or underflowed samples."""


class BapViolatedError(TvgamesError):
    """Envelope check requires a summable perturbation schedule."""


class ConfigError(TvgamesError):
    """Experiment configuration could not be parsed or validated."""

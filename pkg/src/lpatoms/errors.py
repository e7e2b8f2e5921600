"""Exception hierarchy for the lpatoms library."""


class LpatomsError(Exception):
    """Base class for all library errors."""


class InvalidSignalError(LpatomsError):
    """Signal contains NaN or Inf samples."""


class GridMismatchError(LpatomsError):
    """Two signals live on incommensurable grids (different step, or
    offsets that are not an integer multiple of the step)."""


class ResolutionError(LpatomsError):
    """The grid is too coarse to resolve the requested dilation scale.
    Raised instead of silently aliasing."""


class UnsupportedSynthesizerError(LpatomsError):
    """The synthesizer family cannot support the requested operation
    (e.g. non-summable periodization, non-compact support)."""


class NoAnalyticMassError(LpatomsError):
    """The family has no closed-form cell mass."""


class UnsupportedAnalyzerError(LpatomsError):
    """The analyzer is unbounded or has unbounded periodization."""


class ParameterError(LpatomsError):
    """A numeric parameter is outside its admissible range."""


class InadmissibleSynthesizerError(LpatomsError):
    """No scaling lambda achieves an admissibility defect below one, so
    surjective synthesis via the contraction route is unproven."""


class ContractionFailureError(LpatomsError):
    """No scale in the allowed range achieved the required contraction.

    Carries the best ratio seen and the iteration trace so callers can
    distinguish "sigma-prime too small" from "grid too coarse".
    """

    def __init__(self, message, best_j=None, best_ratio=None, trace=None):
        super().__init__(message)
        self.best_j = best_j
        self.best_ratio = best_ratio
        self.trace = list(trace) if trace is not None else []


class CoefficientBoundError(LpatomsError):
    """A computed coefficient sequence violated its certified bound."""


class AdaptationFailureError(LpatomsError):
    """The support margin of the signal inside the target domain is too
    small for the requested scale range."""


class PathIdentityError(LpatomsError):
    """The linear-path defect identity failed beyond tolerance."""

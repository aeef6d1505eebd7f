"""Exception and warning types raised by the reconstruction stages."""


class ReconstructionError(Exception):
    """Base class for failures of the reconstruction pipeline.

    ``stage`` is filled in by :func:`periodrecon.pipeline.reconstruct` when the
    error propagates out of one of its stages.
    """

    stage: str | None = None


class InvalidNoise(ValueError):
    pass


class TooFewPoints(ReconstructionError):
    pass


class NotClosed(ReconstructionError):
    pass


class MultipleComponents(ReconstructionError):
    pass


class ChainNotClosed(ReconstructionError):
    pass


class EmptyNeighborhood(ReconstructionError):
    pass


class NonInvertible(ReconstructionError):
    pass


class AmbiguousMinimum(ReconstructionError):
    pass


class TauTooLarge(UserWarning):
    """Sampling period is not below half the signal period."""

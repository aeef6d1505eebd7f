"""Reconstruction of undersampled periodic signals from short sample trains."""

from .curve import ClosedCurve, PolygonalChain, build_chain, fit_closed_curve, project_to_curve
from .density import DensityProfile, UniformTimeCurve, estimate_density, invert_density
from .errors import (AmbiguousMinimum, ChainNotClosed, EmptyNeighborhood, InvalidNoise,
                     MultipleComponents, NonInvertible, NotClosed, ReconstructionError,
                     TauTooLarge, TooFewPoints)
from .metrics import ErrorReport, max_error, period_error, rms_error
from .sampler import NoiseModel, PointCloud, sample_cloud
from .signal_model import (PeriodicSignal, SampleTrain, extract_train, fourier_signal,
                           make_chirp_like, sine)
from .solver import (OffsetSearchResult, ReconstructionResult, assemble_signal, find_offset,
                     objective_F)
from .pipeline import ExperimentConfig, reconstruct, run_experiment

__version__ = "0.1.0"

"""Isometry invariants and metrics for finite point clouds in R^n."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .errors import (
    GenerationFailure,
    InvalidInput,
    IsoCloudsError,
    NotGeneric,
    NumericalFailure,
    ParseError,
    TooLarge,
)
from .geometry import (
    CenteredCloud,
    CovarianceSpectrum,
    PointCloud,
    bottleneck,
    center,
    covariance,
    eigen_sym,
    minkowski_dist,
    spectrum,
)
from .metrics import (
    FlowMatrix,
    MetricReport,
    assignment_min_cost,
    emd,
    emd_columns,
    emd_columns_report,
    emd_isometry_report,
    emd_wmi,
    lac,
    lac_isometry,
    lac_isometry_report,
)
from .pci import PCM, GenericityReport, cov_perturbation_bound, is_principally_generic, pcm, sm_clouds, sm_matrices
from .wmi import WMIDistribution, WeightedMatrix, canonicalize_matrix, mirror_wmi, reflect, wmi

__all__ = [name for name in dir() if not name.startswith("_")]

"""Eigenstructure, spectral projections and gap quantities of the operator family."""

from .eigen import (
    SpectralDecomposition,
    eigen_projector,
    eigensolve,
    eigenvalue_gap,
    full_decomposition,
    spectrum_separation,
)
from .gaps import (
    eigenspace_hausdorff,
    in_sector,
    norm_ratio_probe,
    operator_norm,
    projection_gap,
    resolvent_difference,
    resolvent_gap,
    sector_resolvent_gap,
    sector_samples,
    slow_semigroup_gap,
)
from .riesz import RieszProjection, contour_points, default_radius, riesz_projection
from .semigroup import (
    DecayReport,
    SlowFlowReport,
    semigroup_decay_check,
    slow_semigroup_check,
)

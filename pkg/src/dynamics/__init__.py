"""Reaction terms, equilibria, time stepping, invariant manifold and attractors."""

from .attractor import (
    AttractorGapReport,
    AttractorSample,
    HausdorffReport,
    attractor_gap,
    attractor_sample,
    hausdorff,
    limit_attractor_sample,
)
from .equilibria import (
    Equilibrium,
    PerturbedEquilibrium,
    limit_equilibria,
    linearization_margin,
    newton,
    perturbed_equilibria,
)
from .integrator import ModalBasis, Trajectory, integrate, step
from .manifold import (
    AttractionReport,
    ConsistencyReport,
    GraphSection,
    ManifoldSettings,
    default_horizon,
    exponential_attraction_check,
    graph_transform,
    grid_for,
    manifold_consistency,
    reduced_flow,
    solve_manifold,
)
from .reaction import Reaction, cubic, linear

"""Mesh, P1 assembly, averaging projection and elliptic solves."""

from .assembly import DiscreteOperator, assemble, h1_gram
from .elliptic import backward_error, norm, quadratic_form, solve_elliptic
from .mesh import CoefficientField, IntervalMesh, midpoint_lp_norm
from .projection import AveragingProjection, average

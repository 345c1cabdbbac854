"""Optimal unambiguous discrimination of linearly independent quantum states.

Computes the measurement that identifies each of N nonorthogonal states
without ever misidentifying one, maximizing the prior-weighted success
probability. The constrained problem reduces to an eigenvalue minimization
over the positive orthant of a sphere (equal priors) or ellipsoid (general
priors); closed-form shortcuts cover two states, equal-overlap sets,
symmetric (circulant-overlap) sets and the lowest-eigenvector criterion.
The resulting POVM is constructed explicitly together with its unitary
extension to a projective measurement on an enlarged space.
"""

from ._kernels import available_backends, backend_name
from .analytic import (
    AnalyticVerdict,
    StateSet,
    TwoStateSolution,
    circulant_solve,
    equal_overlap_pm,
    gram,
    hermitize,
    symmetric_point_verdict,
    two_state_solve,
)
from .config import TOLS, Tolerances
from .families import FamilyInstance, FamilySpec, gen, random_states, verify_family
from .geometry import ellipsoid_point, symmetric_point, uniform_priors, uniform_sphere_point
from .neumark import NeumarkUnitary, extend, extend_tensor, polar_unitary, project_statistics
from .optimizer import (
    OptimizationResult,
    OptimizerConfig,
    feasibility_check,
    grid_oracle,
    mu_m_sq,
    optimize,
)
from .povm import (
    PovmSet,
    ancilla_full,
    ancilla_reduced,
    complement,
    detection_operators,
    scaled_reciprocals,
    shrink_weights,
)
from .simulator import SimulationReport, born_table, simulate

__version__ = "0.1.0"

__all__ = [
    "AnalyticVerdict",
    "FamilyInstance",
    "FamilySpec",
    "NeumarkUnitary",
    "OptimizationResult",
    "OptimizerConfig",
    "PovmSet",
    "SimulationReport",
    "StateSet",
    "TOLS",
    "Tolerances",
    "TwoStateSolution",
    "ancilla_full",
    "ancilla_reduced",
    "available_backends",
    "backend_name",
    "born_table",
    "circulant_solve",
    "complement",
    "detection_operators",
    "ellipsoid_point",
    "equal_overlap_pm",
    "extend",
    "extend_tensor",
    "feasibility_check",
    "gen",
    "gram",
    "grid_oracle",
    "hermitize",
    "mu_m_sq",
    "optimize",
    "polar_unitary",
    "project_statistics",
    "random_states",
    "scaled_reciprocals",
    "shrink_weights",
    "simulate",
    "symmetric_point",
    "symmetric_point_verdict",
    "two_state_solve",
    "uniform_priors",
    "uniform_sphere_point",
    "verify_family",
]

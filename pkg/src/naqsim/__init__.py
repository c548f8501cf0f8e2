"""Two-qubit transverse-field Ising dynamics with nonassociative bath feedback."""
__version__ = "0.1.0"

from .generator import GeneratorContext, build_context, rhs
from .integrator import IntegratorConfig, TrajectoryRecord, evolve, integrate
from .observables import concurrence, purity, steady_state_summary, von_neumann_entropy
from .operators import SystemParams, build_tfim, initial_plus_product
from .qlinalg import NumericalError

__all__ = [
    "GeneratorContext",
    "IntegratorConfig",
    "NumericalError",
    "SystemParams",
    "TrajectoryRecord",
    "build_context",
    "build_tfim",
    "concurrence",
    "evolve",
    "initial_plus_product",
    "integrate",
    "purity",
    "rhs",
    "steady_state_summary",
    "von_neumann_entropy",
]

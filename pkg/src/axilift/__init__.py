"""Desk-scale numerics for the weighted five-dimensional lift of the
axisymmetric axis problem."""
from ._accel import backend
from .corridor import CorridorParams, derive_corridor, exponent_table, indicial_residual
from .dynamics import (DeGiorgiConfig, IterationTrace, MorreyConfig, axis_envelope, degiorgi_k0,
                       degiorgi_run, morrey_run, morrey_threshold, source_bound)
from .elliptic import (SolveReport, WeightedOperator, assemble, friedrichs_mu1, solve_dirichlet,
                       solve_potential)
from .fitting import FitResult, fit_loglog
from .functionals import (annular_comparison, capacity_bound, cutoff_energies, multiplier_ratio,
                          quartic_profile, sobolev_ratio)
from .grid import (MeridianGrid, ScalarField, SpaceTimeField, build_grid, dirichlet_energy,
                   integrate, restrict_subcylinder)
from .parabolic import ContractionReport, EvolutionConfig, estimate_contraction, evolve, lin_energy

__version__ = "0.1.0"

__all__ = [
    "CorridorParams", "ContractionReport", "DeGiorgiConfig", "EvolutionConfig", "FitResult",
    "IterationTrace", "MeridianGrid", "MorreyConfig", "ScalarField", "SolveReport",
    "SpaceTimeField", "WeightedOperator", "annular_comparison", "assemble", "axis_envelope",
    "backend", "build_grid", "capacity_bound", "cutoff_energies", "degiorgi_k0", "degiorgi_run",
    "derive_corridor", "dirichlet_energy", "estimate_contraction", "evolve", "exponent_table",
    "fit_loglog", "friedrichs_mu1", "indicial_residual", "integrate", "lin_energy",
    "morrey_run", "morrey_threshold", "multiplier_ratio", "quartic_profile",
    "restrict_subcylinder", "solve_dirichlet", "solve_potential", "sobolev_ratio",
    "source_bound",
]

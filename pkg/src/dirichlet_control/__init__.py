"""Finite elements for Dirichlet boundary control in the energy space."""

from .assembly import (EDGE_MIDPOINT, SEVEN_POINT, FeFunction, QuadratureRule,
                       assemble_boundary_mass, assemble_load, assemble_mass,
                       assemble_stiffness, element_mass, element_stiffness,
                       quadrature_rule)
from .control import (ControlProblem, ControlSolution, homogenize,
                      solve_homogeneous_dirichlet, solve_reduced,
                      solve_unconstrained)
from .error_analysis import (ConvergenceRecord, energy_errors, fit_rate,
                             prolongate)
from .experiments import ExperimentConfig, run_experiment
from .harmonic import discrete_harmonic_extension, harmonic_basis
from .linalg import (SolverError, TripletBuffer, assemble_from_triplets,
                     solve_spd, solve_symmetric_indefinite)
from .mesh import Mesh, boundary_nodes, mesh_size, refine_uniform, unit_square_mesh
from .pdas import ActiveSetState, KKTResidual, kkt_residual, solve_constrained

__version__ = "0.1.0"

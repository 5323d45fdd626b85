"""Guaranteed a posteriori error control for linear parabolic problems.

Approximations come from implicit or explicit time stepping or from
space-time finite elements; a functional error majorant is minimised over
vector Lagrange fluxes and its element contributions drive adaptive
refinement.
"""
from .adapt import adapt_slab_loop, adapt_spacetime_loop
from .expr import ExprDomainError, ExprFn, ExprSyntaxError, eval_expr, parse_expr
from .fem import (DiscreteField, FESpace, assemble_div_div, assemble_g, assemble_mass,
                  assemble_stiffness, assemble_vector_mass, assemble_z, time_moment_F)
from .linsolve import SolverError, solve_spd
from .majorant import (MajorantParams, MajorantReport, efficiency_index, majorant_general,
                       optimal_beta, optimize_flux_slab, optimize_flux_spacetime, residual_d,
                       residual_eq, run_timestepping_with_majorant)
from .mesh import (MarkedSet, SimplicialMesh, audit_mesh, build_box_mesh, build_polygon_mesh,
                   mark_average, mark_bulk, read_mesh, refine, write_mesh)
from .parabolic import (SlabSolution, energy_error, interpolate, solve_spacetime, step_explicit,
                        step_implicit)
from .problem import Domain, ProblemSpec, TimeGrid, example, manufacture
from .quadrature import Quadrature, simplex_quadrature

__all__ = [
    "adapt_slab_loop", "adapt_spacetime_loop",
    "ExprDomainError", "ExprFn", "ExprSyntaxError", "eval_expr", "parse_expr",
    "DiscreteField", "FESpace", "assemble_div_div", "assemble_g", "assemble_mass",
    "assemble_stiffness", "assemble_vector_mass", "assemble_z", "time_moment_F",
    "SolverError", "solve_spd",
    "MajorantParams", "MajorantReport", "efficiency_index", "majorant_general", "optimal_beta",
    "optimize_flux_slab", "optimize_flux_spacetime", "residual_d", "residual_eq",
    "run_timestepping_with_majorant",
    "MarkedSet", "SimplicialMesh", "audit_mesh", "build_box_mesh", "build_polygon_mesh",
    "mark_average", "mark_bulk", "read_mesh", "refine", "write_mesh",
    "SlabSolution", "energy_error", "interpolate", "solve_spacetime", "step_explicit",
    "step_implicit",
    "Domain", "ProblemSpec", "TimeGrid", "example", "manufacture",
    "Quadrature", "simplex_quadrature",
]

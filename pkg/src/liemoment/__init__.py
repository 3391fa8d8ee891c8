"""Semiclassical truncation of Lie-algebra quantum state spaces.

Exact enveloping-algebra arithmetic, Weyl-ordered moments, truncated quantum
Poisson brackets, Casimir constraint towers with independence analysis, and
effective Hamiltonian dynamics, cross-checked against matrix representations.
"""

from ._numbers import GaussQ, rational
from .algebra_def import (ConfigError, LieAlgebraSpec, TruncationOrder, abelian,
                          casimir_element, cubic_example, load_algebra, su2, validate)
from .casimir_constraints import (ConstraintTower, GradientReport, count_nontrivial,
                                  generate_tower, independence_check, inv_c_derivative,
                                  kernel_recursion_check, scan_grid, symmetric_gradient)
from .coeffpoly import CoeffPoly
from .moments import MomentPoly, PhasePoint, evaluate, expectation, order, truncate
from .nc_poly import (DX, X, NCPoly, commutator, is_central, normal_form,
                      weyl_basis_decompose, weyl_symmetrize)
from .qpoisson import BracketTable, bracket, bracket_ext, truncated_bracket

__version__ = "0.1.0"

__all__ = [
    "GaussQ", "rational", "ConfigError", "LieAlgebraSpec", "TruncationOrder", "abelian",
    "casimir_element", "cubic_example", "load_algebra", "su2", "validate", "ConstraintTower",
    "GradientReport", "count_nontrivial", "generate_tower", "independence_check",
    "inv_c_derivative", "kernel_recursion_check", "scan_grid", "symmetric_gradient",
    "CoeffPoly", "MomentPoly", "PhasePoint", "evaluate", "expectation", "order", "truncate",
    "DX", "X", "NCPoly", "commutator", "is_central", "normal_form", "weyl_basis_decompose",
    "weyl_symmetrize", "BracketTable", "bracket", "bracket_ext", "truncated_bracket",
]

"""Numerical workbench for the nested Bethe ansatz on open gl(m|n) spin chains.

Rational (Yangian) and trigonometric (quantum affine) models with diagonal
boundaries.  Every analytic statement is paired with a brute-force check.
"""

from .bethe import BetheState, BetheSystem, be_residual, eigenvalue, gamma, hat_lambda, solve
from .chain import ChainSpec, DimensionCapError, build_double_row, nested_operator, pseudo_vacuum
from .functions import BoundaryParams, ModelSpec, PoleError, rational, trigonometric
from .graded import GradedOperator, GradingSpec, Tolerance
from .rmatrix import r_matrix
from .transfer import brute_spectrum, match_eigenvalue, transfer
from .vectors import (
    BetheVector,
    phi3_11,
    vector_aba,
    vector_recursion,
    vector_supertrace,
    verify_eigenvector,
)

__version__ = "0.1.0"

__all__ = [
    "BetheState", "BetheSystem", "be_residual", "eigenvalue", "gamma", "hat_lambda", "solve",
    "ChainSpec", "DimensionCapError", "build_double_row", "nested_operator", "pseudo_vacuum",
    "BoundaryParams", "ModelSpec", "PoleError", "rational", "trigonometric",
    "GradedOperator", "GradingSpec", "Tolerance", "r_matrix",
    "brute_spectrum", "match_eigenvalue", "transfer",
    "BetheVector", "phi3_11", "vector_aba", "vector_recursion", "vector_supertrace",
    "verify_eigenvector",
]

"""Polynomial invariants of polynomial loops over exact rationals."""

__version__ = "0.1.0"

from .poly import (LinearForm, NotDivisible, Polynomial, VarContext, coefficients_wrt_x, compose,
                   divide_exact, format_poly, monomials_up_to_degree, parse_poly)
from .linalg import (PolyMatrix, kernel_basis, kernel_of_linear_forms, matrix_from_linear_polys,
                     minors, parametric_kernel_cells)
from .groebner import GREVLEX, LEX, GroebnerBasis, MonomialOrder, buchberger, ideal_membership, \
    in_radical, normal_form
from .loop import CandidateSpace, LoopProgram, SymbolicInitRequiredConcrete, load_loop, parse_loop, unroll
from .invariants import IterationLimitExceeded, check_pi, check_pi_batch, check_pi_branch, \
    invariant_set, invariant_set_branch
from .generate import (AnsatzMatrix, ConstructibleCell, InvariantBasis, compute_matrix,
                       compute_matrix_branch, sufficient_constraints, truncated_class,
                       truncated_ideal, truncated_ideal_branch)
from .general import GeneralInvariant, NotOfForm, check_fixed_identity, general_invariants, \
    reduce_scaled_form
from .termination import TerminationVerdict, never_terminates_algebraic

__all__ = [
    "LinearForm",
    "NotDivisible",
    "Polynomial",
    "VarContext",
    "coefficients_wrt_x",
    "compose",
    "divide_exact",
    "format_poly",
    "monomials_up_to_degree",
    "parse_poly",
    "PolyMatrix",
    "kernel_basis",
    "kernel_of_linear_forms",
    "matrix_from_linear_polys",
    "minors",
    "parametric_kernel_cells",
    "GREVLEX",
    "LEX",
    "GroebnerBasis",
    "MonomialOrder",
    "buchberger",
    "ideal_membership",
    "in_radical",
    "normal_form",
    "CandidateSpace",
    "LoopProgram",
    "SymbolicInitRequiredConcrete",
    "load_loop",
    "parse_loop",
    "unroll",
    "IterationLimitExceeded",
    "check_pi",
    "check_pi_batch",
    "check_pi_branch",
    "invariant_set",
    "invariant_set_branch",
    "AnsatzMatrix",
    "ConstructibleCell",
    "InvariantBasis",
    "compute_matrix",
    "compute_matrix_branch",
    "sufficient_constraints",
    "truncated_class",
    "truncated_ideal",
    "truncated_ideal_branch",
    "GeneralInvariant",
    "NotOfForm",
    "check_fixed_identity",
    "general_invariants",
    "reduce_scaled_form",
    "TerminationVerdict",
    "never_terminates_algebraic",
]

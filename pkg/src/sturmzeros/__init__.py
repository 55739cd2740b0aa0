"""Zeros of combinations of Dirichlet eigenfunctions, counted and checked."""

from .errors import (
    BracketFailure,
    BudgetExceeded,
    DegenerateProbe,
    EvalDomainError,
    IntegrationFailure,
    NearSingular,
    NotConstant,
    OrderBudget,
    PotentialSyntaxError,
    UnresolvedZero,
    VerificationFailure,
    ZeroVector,
)
from .potential import Potential, differentiate, evaluate, parse_potential
from .slater import NodeSpec, cofactor_coeffs, confluent_matrix_det, confluent_slater, sign_normalize, slater_det
from .spectral import (
    DirichletProblem,
    EigenPair,
    SpectralBasis,
    eval_derivative,
    orthonormality_matrix,
    prufer_terminal_angle,
    solve_basis,
    solve_eigen,
)
from .zeros import (
    ZeroRecord,
    ZeroReport,
    check_gantmacher_krein,
    check_sign_changes_lower,
    check_sturm_upper,
    find_zeros,
    liouville_iterate,
    reconstruct_from_zeros,
)

__version__ = "0.1.0"

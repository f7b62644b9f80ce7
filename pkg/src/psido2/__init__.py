"""Exact truncated pseudo-differential operator calculus in two variables."""
from .errors import ArtifactError, FormatError, PreconditionError
from .verdict import Tri
from .series import INF, XSeries, antideriv, d_dx, exp_series, geometric_x2, invert_unit, linear_substitute
from .operators import (
    D1,
    D2,
    X,
    D1Op,
    EPlusOp,
    SymbolPoly,
    commutator,
    d1_mul,
    discrepancies,
    eplus_mul,
    full_symbol,
    gamma_order,
    highest_term,
    invert_monic,
    is_pdo,
    linear_change,
    op_exp,
    poisson_bracket,
    principal_symbol,
)
from .action import SubspaceW, ZSeries, echelon_basis, reduce_to_V, right_act, stabilizes, support, z_to_op
from .growth import GrowthCert, check_A, check_AA, check_strong, check_super_strong, ford, in_Pi_alpha
from .sato import reconstruct_s, reconstruct_s_certified, w_from_s
from .dressing import (
    almost_normalize,
    conjugate_by,
    dress,
    is_admissible_operator,
    kth_root,
    l1_from_q,
    normalize,
    normalize_full,
    schur_from_ring,
)
from .schur import (
    UTSeries,
    Valuation2,
    filtration_dims,
    invariants_NA,
    nu,
    psi1,
    psi1_inv,
    recoordinatize,
    ring_closure,
    validate_schur_pair,
)
from .workbench import (
    BAFunction,
    apply_to_exponential,
    eigenvalue_check,
    example_burchnall_chaundy,
    example_calogero_symbols,
    example_toric,
    sato_wilson_rhs,
)

__version__ = "0.1.0"

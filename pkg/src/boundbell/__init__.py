"""Numerical toolkit for a bound-entangled multiqubit state family.

Builds the GHZ-plus-flip-projector family, certifies its partial-transpose
structure across all bipartitions, evaluates and optimizes the recursive
multiqubit Bell operator, and simulates the local-filtering extraction of a
maximally entangled pair from any entangled pure state.
"""

from .bell import (
    BellOperator,
    BellSettings,
    bell_value,
    build_bell,
    closed_form_xy,
    optimize_settings,
    pauli_along,
)
from .extraction import (
    BranchClassification,
    ExtractionResult,
    ExtractionStep,
    FilterOperator,
    NotEntangledError,
    NumericDegeneracyError,
    PairUnavailableError,
    classify_branch,
    equalize_filter,
    extract,
    reduce_to_parties,
    replay,
    schmidt_profile,
    target_pair_choice,
)
from .ppt import (
    BipartitionScan,
    PptReport,
    RhoClassification,
    classify_family,
    ppt_check,
    scan,
)
from .states import (
    RhoFamilySpec,
    default_alpha,
    flip_index,
    flip_projectors,
    ghz,
    ghz_projector,
    random_pure,
    rho_family,
)
from .tensor import (
    DensityOperator,
    PartyLayout,
    PureState,
    SchmidtDecomposition,
    apply_local,
    basis_state,
    hermitian_eigenvalues,
    partial_trace,
    partial_transpose,
    schmidt,
    tensor_product,
)

__version__ = "0.1.0"

__all__ = [
    "BellOperator",
    "BellSettings",
    "BipartitionScan",
    "BranchClassification",
    "DensityOperator",
    "ExtractionResult",
    "ExtractionStep",
    "FilterOperator",
    "NotEntangledError",
    "NumericDegeneracyError",
    "PairUnavailableError",
    "PartyLayout",
    "PptReport",
    "PureState",
    "RhoClassification",
    "RhoFamilySpec",
    "SchmidtDecomposition",
    "apply_local",
    "basis_state",
    "bell_value",
    "build_bell",
    "classify_branch",
    "classify_family",
    "closed_form_xy",
    "default_alpha",
    "equalize_filter",
    "extract",
    "flip_index",
    "flip_projectors",
    "ghz",
    "ghz_projector",
    "hermitian_eigenvalues",
    "optimize_settings",
    "partial_trace",
    "partial_transpose",
    "pauli_along",
    "ppt_check",
    "random_pure",
    "reduce_to_parties",
    "replay",
    "rho_family",
    "scan",
    "schmidt",
    "schmidt_profile",
    "target_pair_choice",
    "tensor_product",
]

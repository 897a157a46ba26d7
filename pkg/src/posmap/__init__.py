"""Positive maps between matrix algebras: Choi calculus, cone tests, bi-dual faces.

The public surface is re-exported here; submodules hold the details.
"""

from .linalg import (
    DimensionError,
    Tolerance,
    DEFAULT_TOL,
    eig_hermitian_min,
    kernel_basis,
    kron,
    matrix_unit,
    numerical_rank,
    pairing,
    principal_submatrix,
)
from .maps import (
    DegenerateInputError,
    MapRep,
    ad,
    adjoint,
    apply,
    choi_of,
    compose,
    flip,
    identity_map,
    lambda_compress,
    lambda_embed,
    map_of_choi,
    pairing_maps,
    pairing_state_map,
    st_maps,
    svd_reduce,
    transpose_map,
)
from .cones import (
    ConeVerdict,
    SpecialWitnessForm,
    UnsupportedDimensionError,
    block_positive_special,
    is_completely_positive,
    is_positive_map,
    is_superpositive_2x2,
    min_product_expectation,
)
from .bidual import (
    FaceConstraintSystem,
    ZeroVarietySample,
    bidual_dimension,
    bidual_membership,
    build_constraints,
    probe_bidual,
    sample_zero_variety,
)
from .woronowicz import (
    GeneratingFamily,
    WoronowiczReport,
    commutant_dimension,
    explicit_family,
    factor_through,
    family_span_dim,
    hat_matrix,
    is_unital,
    n_phi_basis,
    woronowicz_verdict,
)
from .pipeline import RankInstabilityError, pipeline_marciniak

__version__ = "0.1.0"

"""Stiefel manifolds over R, C and H: Cayley coordinates, eigenspace strata, collapse maps.

Scalars are stored as real coefficient arrays (1, 2 or 4 components) and
matrices act on the left of column vectors, so every routine is right
K-linear and the same code runs over all three fields.
"""
from .algebra import (
    Field,
    FieldMismatchError,
    GaloisElement,
    Quaternion,
    ScalarValue,
    conjugate,
    galois_apply,
    galois_compose,
    galois_equal,
    galois_inverse,
    scalar_mul,
)
from .matk import (
    DEFAULT_TOL,
    DimensionError,
    KMatrix,
    SingularMatrixError,
    ToleranceConfig,
    add,
    adjoint,
    gauss_inverse,
    identity,
    image_orthobasis,
    inner_product,
    is_isometry,
    matmul,
    random_isometry,
    random_matrix,
    random_selfadjoint,
    random_skew,
    rank,
    real_scale,
    skew_self_split,
)
from .series import (
    PowerSeries,
    product_poincare,
    rep_dims,
    series_compare,
    thom_dimension_table,
    wedge_poincare,
)
from .spectral import (
    ConvergenceError,
    NotPositiveDefiniteError,
    NotSelfAdjointError,
    PolarFactorization,
    RankDeficientError,
    SpectralDecomposition,
    eigh,
    exp_matrix,
    exp_selfadjoint,
    log_posdef,
    polar_factor,
    sqrt_posdef,
)
from .splitting import (
    BASEPOINT,
    HomDecomposition,
    collapse_cflat,
    collapse_t,
    composite_F,
    hom_assemble,
    hom_decompose,
    jacobian_origin_check,
)
from .stiefel import (
    AboveStratum,
    AmbiguousRankError,
    CayleyCoords,
    InLowerStratum,
    LevelDeficientError,
    NotIsometricError,
    StiefelPoint,
    StratumCoords,
    ZetaMap,
    cayley,
    cayley_inv,
    conjugate_embedding,
    filtration_level,
    galois_act,
    inclusion,
    stratum_decompose,
    stratum_reconstruct,
    zeta,
)

__version__ = "0.1.0"

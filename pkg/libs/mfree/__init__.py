"""
mfree

Moments and distributions of matricially free limit laws and random
pseudomatrices, computed by partition sums, continued fractions, closed
forms, tree walks and an exact finite-n Fock-space model.
"""

from .errors import (
    MfreeError,
    InvalidParameterError,
    ModelError,
    PartitionError,
    DimensionMismatchError,
    PoleError,
    FockError,
    TruncationOverflowError,
    UnsupportedPatternError,
    FixedPointError,
    StabilizationError,
    ConfigError,
)
from .numeric import Profile, coerce, format_number, within_tolerance
from .matrices import SquareMatrix, DiagonalMatrix
from .ncpart import NcPairPartition, enumerate_nc2, decompose, reassemble, colorings
from .trace_fn import v_of, v0_of, tracial_value, standard_value
from .series import (
    PowerSeries,
    MomentSeries,
    KSeries,
    ContinuedFractionSpec,
    k_to_moments,
    moments_to_k,
    cf_to_kseries,
    cf_evaluate,
    cauchy_transform,
    density_grid,
)
from .convolve import (
    NamedLaw,
    as_kseries,
    boolean_conv,
    orthogonal_conv,
    monotone_conv,
    sfree_conv,
    free_conv,
    t_transform,
)
from .limit_law import (
    BlockModel,
    LimitFamily,
    CrossCheckReport,
    blockify,
    tracial_moments_combinatorial,
    standard_moments_combinatorial,
    limit_family,
    dim2_closed_forms,
    cross_check,
)
from .tree_walk import MatricialWeighting, walk_moment, walk_moments
from .fock_sim import (
    Flavor,
    Shape,
    FockWord,
    FockState,
    PairOperator,
    Reference,
    PseudomatrixSpec,
    create,
    annihilate,
    unit_project,
    pseudomatrix_moment,
    mixed_moment,
    relations_check,
    convergence_table,
)

__version__ = "1.0.0"
__all__ = [
    "MfreeError",
    "InvalidParameterError",
    "ModelError",
    "PartitionError",
    "DimensionMismatchError",
    "PoleError",
    "FockError",
    "TruncationOverflowError",
    "UnsupportedPatternError",
    "FixedPointError",
    "StabilizationError",
    "ConfigError",
    "Profile",
    "coerce",
    "format_number",
    "within_tolerance",
    "SquareMatrix",
    "DiagonalMatrix",
    "NcPairPartition",
    "enumerate_nc2",
    "decompose",
    "reassemble",
    "colorings",
    "v_of",
    "v0_of",
    "tracial_value",
    "standard_value",
    "PowerSeries",
    "MomentSeries",
    "KSeries",
    "ContinuedFractionSpec",
    "k_to_moments",
    "moments_to_k",
    "cf_to_kseries",
    "cf_evaluate",
    "cauchy_transform",
    "density_grid",
    "NamedLaw",
    "as_kseries",
    "boolean_conv",
    "orthogonal_conv",
    "monotone_conv",
    "sfree_conv",
    "free_conv",
    "t_transform",
    "BlockModel",
    "LimitFamily",
    "CrossCheckReport",
    "blockify",
    "tracial_moments_combinatorial",
    "standard_moments_combinatorial",
    "limit_family",
    "dim2_closed_forms",
    "cross_check",
    "MatricialWeighting",
    "walk_moment",
    "walk_moments",
    "Flavor",
    "Shape",
    "FockWord",
    "FockState",
    "PairOperator",
    "Reference",
    "PseudomatrixSpec",
    "create",
    "annihilate",
    "unit_project",
    "pseudomatrix_moment",
    "mixed_moment",
    "relations_check",
    "convergence_table",
]

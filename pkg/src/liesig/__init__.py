"""Path signatures, signature kernels and kernel two-sample tests for time
series valued in matrix Lie groups (SO(3), R^N and their products)."""

from .exceptions import AntipodalRotation, BudgetExceeded, LiesigError, SpecMismatch
from .estimators import (
    LeadMatrixTransformer,
    SignatureKernel,
    SignatureMMDTest,
    SignatureTransformer,
)
from .kernel import (
    GramMatrix,
    NormalizationConfig,
    gram_matrix,
    kernel_horner,
    kernel_matrix,
    kernel_naive,
    normalized_signature,
    psi,
    tensor_normalize,
)
from .lie_groups import (
    SO3,
    Euclidean,
    GroupPoint,
    GroupSpec,
    Product,
    closed_form_indices,
    group_exp,
    group_identity,
    group_inv,
    group_log,
    group_mul,
    hat,
    sample_uniform_so3,
    vee,
)
from .paths import (
    DiscretePath,
    concat,
    conjugate,
    discrete_derivative,
    from_euclidean,
    integrate,
    left_translate,
    matrix_representation,
    one_variation,
    path_distance,
    reverse,
    scale_path,
    to_euclidean,
    transform_idinit,
    transform_sliding_window,
    transform_time,
)
from .randwalk import (
    ExperimentConfig,
    ExperimentSummary,
    WalkConfig,
    random_walk_so3,
    random_walks_so3,
    run_experiment,
    sample_vmf,
)
from .signature import (
    lead_matrix,
    level2_matrix,
    signature,
    signature_brute_force,
    signature_continuous,
    signature_discrete,
    signature_matrix,
)
from .stats import TestConfig, TestReport, mmd_unbiased, permutation_test, two_sample_test
from .tensor_algebra import (
    TruncatedTensor,
    shuffle,
    sig_term,
    tt_add,
    tt_dilate,
    tt_exp,
    tt_inner,
    tt_mul,
    tt_norm,
    tt_one,
    tt_project,
    tt_pushforward,
    tt_scale,
)

__version__ = "0.1.0"

__all__ = [
    "AntipodalRotation",
    "BudgetExceeded",
    "closed_form_indices",
    "concat",
    "conjugate",
    "discrete_derivative",
    "DiscretePath",
    "Euclidean",
    "ExperimentConfig",
    "ExperimentSummary",
    "from_euclidean",
    "gram_matrix",
    "GramMatrix",
    "group_exp",
    "group_identity",
    "group_inv",
    "group_log",
    "group_mul",
    "GroupPoint",
    "GroupSpec",
    "hat",
    "integrate",
    "kernel_horner",
    "kernel_matrix",
    "kernel_naive",
    "lead_matrix",
    "LeadMatrixTransformer",
    "left_translate",
    "level2_matrix",
    "LiesigError",
    "matrix_representation",
    "mmd_unbiased",
    "NormalizationConfig",
    "normalized_signature",
    "one_variation",
    "path_distance",
    "permutation_test",
    "Product",
    "psi",
    "random_walk_so3",
    "random_walks_so3",
    "reverse",
    "run_experiment",
    "sample_uniform_so3",
    "sample_vmf",
    "scale_path",
    "shuffle",
    "sig_term",
    "signature",
    "signature_brute_force",
    "signature_continuous",
    "signature_discrete",
    "signature_matrix",
    "SignatureKernel",
    "SignatureMMDTest",
    "SignatureTransformer",
    "SO3",
    "SpecMismatch",
    "tensor_normalize",
    "TestConfig",
    "TestReport",
    "to_euclidean",
    "transform_idinit",
    "transform_sliding_window",
    "transform_time",
    "TruncatedTensor",
    "tt_add",
    "tt_dilate",
    "tt_exp",
    "tt_inner",
    "tt_mul",
    "tt_norm",
    "tt_one",
    "tt_project",
    "tt_pushforward",
    "tt_scale",
    "two_sample_test",
    "vee",
    "WalkConfig",
]

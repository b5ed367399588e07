"""Hermitian matrix Levy processes with rank-one jumps.

Samplers for BGCD-type random matrix ensembles, exact structural
covariation / quadratic variation of their sample paths, covariation
representations of matrix subordinators and bounded-variation paths,
and spectral convergence diagnostics against semicircle and
Marchenko-Pastur targets.
"""

__version__ = "0.1.0"

from .hermitian import (
    RankOneHermitian,
    as_hermitian,
    canonical_phase,
    canonical_vector,
    factor_rank_one,
    frobenius_inner,
    frobenius_norm,
    hermitian_eigen,
    pos_neg_split,
    psd_sqrt,
)
from .scalar_laws import (
    CompoundPoissonLaw,
    ConstantJumps,
    ConvolutionPowerJumps,
    GammaLaw,
    GaussianLaw,
    NormalJumps,
    PoissonLaw,
    ScalarTriplet,
    UniformJumps,
    discretize,
    is_positive_subordinator_spec,
    law_from_json,
    law_to_json,
    sample_conv_power,
    sample_jump,
    small_jump_second_moment,
    weak_convergence_probe,
)
from .paths import (
    BrownianDriver,
    MatrixLevyPath,
    RankOneJumps,
    VectorJumps,
    VectorLevyPath,
    evaluate_path,
    matrix_levy_exponent,
    sample_bgcd_approx,
    sample_bgcd_compound_poisson,
    sample_bgcd_gaussian_part,
    sample_uniform_sphere,
)
from .covariation import (
    CovariationResult,
    JumpPath,
    adjoint,
    bilinearity_check,
    quadratic_variation,
    realized_covariation,
    sample_on_grid,
    structural_covariation,
)
from .representations import (
    RepresentationReport,
    bgcd_covariation_pair,
    default_checkpoints,
    independence_probe,
    sample_signed_path,
    sample_subordinator_path,
    subordinator_to_vector_process,
    verify_representation,
    wiener_hopf_split,
)
from .spectral import (
    Cauchy,
    EmpiricalReference,
    EmpiricalSpectralDistribution,
    MarchenkoPastur,
    Semicircle,
    esd,
    free_target_for,
    ks_distance,
    target_cdf,
    target_pdf,
    target_quantile,
    wasserstein_distance,
)

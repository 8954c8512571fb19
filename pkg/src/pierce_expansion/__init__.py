"""Exact Ostrogradsky-Sierpinski-Pierce expansion toolkit."""
from .dynamics import (
    DigitStats,
    FrequencyReport,
    UniformSampler,
    birkhoff_average,
    digit_stats,
    frequency_experiment,
    leading_digits,
)
from .estimators import DigitCountTransformer, IIDDigitLawEstimator, PierceDigitEncoder
from .exceptions import (
    DepthShortfall,
    DomainError,
    OrbitTerminated,
    PierceError,
    ResourceCapExceeded,
    ValidationError,
)
from .expansion import (
    Cylinder,
    GSequence,
    QSequence,
    cylinder,
    encode,
    evaluate,
    g_from_q,
    partial_sums,
    q_from_g,
    shift,
)
from .measure import (
    DigitConstraint,
    Level,
    MeasureEstimate,
    a_k_measure,
    cover_measure,
    hausdorff_alpha_volume,
    hausdorff_ratio_threshold,
    parse_constraint,
    theorem1_series,
)
from .random_eta import (
    DigitDistribution,
    Purity,
    PurityVerdict,
    StochasticMatrix,
    discreteness_criterion,
    invariance_check,
    ks_uniform,
    parse_matrix,
    sample_eta,
    singularity_experiment,
)

__version__ = "0.1.0"

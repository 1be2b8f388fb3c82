"""Junta learning over smoothed Markov random fields, with brute-force oracles."""

from .junta import Decomposition, Junta, decompose, eval_junta, label_samples, multilinear_expansion, random_junta
from .learner import (
    LearnerConfig,
    StatisticRecord,
    ThresholdTooLowError,
    baseline_product_statistic,
    default_threshold,
    empirical_statistic,
    find_relevant_variables,
    learn_junta,
    learn_with_report,
)
from .mrf import (
    DependencyGraph,
    ModelValidationError,
    MrfModel,
    SmoothingVector,
    apply_smoothing,
    conditional_probability,
    load_model,
    save_model,
)
from .polynomial import MultilinearPolynomial, eval_poly, partial_derivative, width
from .sampling import (
    ExactDistribution,
    GibbsConfig,
    Restriction,
    SampleSet,
    conditional_exact,
    enumerate_distribution,
    gibbs_sample,
    restrict_samples,
    sample_exact,
)

__version__ = "0.1.0"

"""
投影线性函数逼近：SOR 递推、期望算子、收缩估计与有限时间误差界
"""

from .bound import (
    BoundParams,
    LemmaReport,
    StepSchedule,
    lemma_sequence_check,
    proof_bound,
    proof_constants,
    theorem1_bound,
)
from .experiment import LinearExperimentResult, optimal_parameters, run_linear_experiment
from .features import FeatureMap, one_hot_features, random_features
from .recursion import (
    LinearParams,
    estimate_contraction,
    estimate_noise_bound,
    expected_operator,
    linear_target,
    martingale_noise,
    project_l2,
    sor_linear_update,
)

__all__ = [
    "BoundParams",
    "FeatureMap",
    "LemmaReport",
    "LinearExperimentResult",
    "LinearParams",
    "StepSchedule",
    "estimate_contraction",
    "estimate_noise_bound",
    "expected_operator",
    "lemma_sequence_check",
    "linear_target",
    "martingale_noise",
    "one_hot_features",
    "optimal_parameters",
    "project_l2",
    "proof_bound",
    "proof_constants",
    "random_features",
    "run_linear_experiment",
    "sor_linear_update",
    "theorem1_bound",
]

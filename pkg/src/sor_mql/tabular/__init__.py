"""
表格型 SOR 极小极大求解：Bellman 算子、值迭代、策略迭代与在线 Q 学习
"""

from .random_models import random_model, self_loop_model
from .sor import (
    SorConfig,
    check_relaxation,
    contraction_ratios,
    extract_policy,
    generalized_policy_iteration,
    policy_evaluation_apply,
    run_q_learning,
    sor_bellman_apply,
    sor_q_learning_step,
    sor_target,
    state_values,
    step_size,
    value_iteration,
    w_star,
)

__all__ = [
    "SorConfig",
    "check_relaxation",
    "contraction_ratios",
    "extract_policy",
    "generalized_policy_iteration",
    "policy_evaluation_apply",
    "random_model",
    "run_q_learning",
    "self_loop_model",
    "sor_bellman_apply",
    "sor_q_learning_step",
    "sor_target",
    "state_values",
    "step_size",
    "value_iteration",
    "w_star",
]

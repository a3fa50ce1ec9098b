"""
深度 SOR 极小极大 Q 学习：numpy 网络、优化器、经验回放与训练循环
"""

from .agent import (
    LOG_COLUMNS,
    AlgoConfig,
    FeatureCache,
    TrainResult,
    TrainState,
    algo_config_dict,
    compute_target,
    epsilon,
    load_weights,
    minimax_target,
    opponent_action,
    save_weights,
    select_action,
    train,
)
from .gradcheck import batch_numeric_gradient, max_relative_error, numeric_gradient
from .mlp import (
    DEFAULT_HIDDEN,
    MlpParams,
    init_mlp,
    mlp_forward,
    mlp_forward_batch,
    mlp_gradient,
    mse_loss,
    pair_index,
)
from .optim import SGD, Adam, make_optimizer
from .replay import ReplayBuffer

__all__ = [
    "DEFAULT_HIDDEN",
    "LOG_COLUMNS",
    "SGD",
    "Adam",
    "AlgoConfig",
    "FeatureCache",
    "MlpParams",
    "ReplayBuffer",
    "TrainResult",
    "TrainState",
    "algo_config_dict",
    "batch_numeric_gradient",
    "compute_target",
    "epsilon",
    "init_mlp",
    "load_weights",
    "make_optimizer",
    "max_relative_error",
    "minimax_target",
    "mlp_forward",
    "mlp_forward_batch",
    "mlp_gradient",
    "mse_loss",
    "numeric_gradient",
    "opponent_action",
    "pair_index",
    "save_weights",
    "select_action",
    "train",
]

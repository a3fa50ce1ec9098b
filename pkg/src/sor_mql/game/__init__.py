"""
矩阵博弈核心：LP 求解、val 算子与最优反应
"""

from .matrix_game import (
    DEFAULT_TOL,
    GameSolution,
    as_payoff_matrix,
    batch_response_values,
    best_response_column,
    game_value,
    response_value,
    solve_matrix_game,
)

__all__ = [
    "DEFAULT_TOL",
    "GameSolution",
    "as_payoff_matrix",
    "batch_response_values",
    "best_response_column",
    "game_value",
    "response_value",
    "solve_matrix_game",
]

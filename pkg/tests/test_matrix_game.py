#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import unittest
import os
import sys

import numpy as np

# 添加 src 目录到 Python 路径
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))

from sor_mql.errors import DimensionMismatch, InvalidParams, NonFiniteInput
from sor_mql.game import (
    batch_response_values,
    best_response_column,
    game_value,
    response_value,
    solve_matrix_game,
)


def grid_search_value(q: np.ndarray, step: float = 1e-3) -> float:
    """两行矩阵的策略网格搜索"""
    p = np.arange(0.0, 1.0 + step / 2, step)
    payoff = np.outer(p, q[0]) + np.outer(1.0 - p, q[1])
    return float(payoff.min(axis=1).max())


class TestSolveMatrixGame(unittest.TestCase):
    """测试矩阵博弈的 LP 求解"""

    def test_matching_pennies(self):
        sol = solve_matrix_game([[1.0, -1.0], [-1.0, 1.0]])
        self.assertAlmostEqual(sol.value, 0.0, places=9)
        np.testing.assert_allclose(sol.strategy, [0.5, 0.5], atol=1e-9)

    def test_constant_payoff(self):
        for c in (-3.5, 0.0, 2.0):
            self.assertAlmostEqual(game_value([[c, c], [c, c]]), c, places=12)

    def test_mixed_equilibrium(self):
        sol = solve_matrix_game([[2.0, 1.0], [0.0, 3.0]])
        self.assertAlmostEqual(sol.value, 1.5, places=9)
        np.testing.assert_allclose(sol.strategy, [0.75, 0.25], atol=1e-9)
        np.testing.assert_allclose(sol.opponent_strategy, [0.5, 0.5], atol=1e-9)
        self.assertLessEqual(sol.residual, 1e-9)

    def test_pure_saddle_point(self):
        sol = solve_matrix_game([[3.0, 1.0], [4.0, 2.0]])
        self.assertEqual(sol.value, 2.0)
        np.testing.assert_array_equal(sol.strategy, [0.0, 1.0])
        self.assertEqual(sol.residual, 0.0)

    def test_single_entry(self):
        self.assertEqual(game_value([[7.25]]), 7.25)

    def test_non_finite_input(self):
        with self.assertRaises(NonFiniteInput):
            solve_matrix_game([[1.0, np.nan], [0.0, 1.0]])
        with self.assertRaises(NonFiniteInput):
            solve_matrix_game([[np.inf]])

    def test_bad_shape(self):
        with self.assertRaises(DimensionMismatch):
            solve_matrix_game([1.0, 2.0])
        with self.assertRaises(InvalidParams):
            solve_matrix_game([[1.0]], tol=0.0)

    def test_duality_envelope_and_guarantee(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            rows, cols = rng.integers(1, 9, size=2)
            q = rng.uniform(-1.0, 1.0, size=(rows, cols))
            sol = solve_matrix_game(q)
            self.assertGreaterEqual(sol.value, q.min(axis=1).max() - 1e-9)
            self.assertLessEqual(sol.value, q.max(axis=0).min() + 1e-9)
            self.assertLessEqual(sol.residual, 1e-9)
            self.assertAlmostEqual(response_value(sol.strategy, q), sol.value, delta=1e-9)
            self.assertAlmostEqual(sol.strategy.sum(), 1.0, delta=1e-12)
            self.assertTrue(np.all(sol.strategy >= 0.0))

    def test_grid_search_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            q = rng.uniform(-1.0, 1.0, size=(2, int(rng.integers(1, 9))))
            self.assertAlmostEqual(game_value(q), grid_search_value(q), delta=2e-3)

    def test_affine_covariance_and_role_swap(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            q = rng.normal(size=(4, 3))
            v = game_value(q)
            self.assertAlmostEqual(game_value(q + 2.5), v + 2.5, delta=1e-9)
            self.assertAlmostEqual(game_value(3.0 * q), 3.0 * v, delta=1e-9)
            self.assertAlmostEqual(game_value(-q.T), -v, delta=1e-9)

    def test_saddle_matrices(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            q = rng.integers(-5, 6, size=(3, 4)).astype(float)
            low, high = q.min(axis=1).max(), q.max(axis=0).min()
            if low == high:
                self.assertAlmostEqual(game_value(q), low, delta=1e-9)


class TestResponses(unittest.TestCase):
    """测试最优反应"""

    q = np.array([[2.0, 1.0], [0.0, 3.0]])

    def test_response_value(self):
        self.assertEqual(response_value([1.0, 0.0], self.q), 1.0)
        self.assertEqual(response_value([0.5, 0.5], [[1.0, -1.0], [-1.0, 1.0]]), 0.0)
        self.assertEqual(response_value([0.75, 0.25], self.q), 1.5)

    def test_best_response_column(self):
        self.assertEqual(best_response_column([1.0, 0.0], self.q), 1)
        self.assertEqual(best_response_column([0.0, 1.0], self.q), 0)
        # 1.5 与 1.5 平局取最小下标
        self.assertEqual(best_response_column([0.75, 0.25], self.q), 0)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            response_value([1.0, 0.0, 0.0], self.q)
        with self.assertRaises(DimensionMismatch):
            best_response_column([1.0], self.q)

    def test_batch_matches_single(self):
        rng = np.random.default_rng(4)
        qs = rng.normal(size=(5, 3, 2))
        pis = rng.dirichlet(np.ones(3), size=5)
        expected = [response_value(p, q) for p, q in zip(pis, qs)]
        np.testing.assert_allclose(batch_response_values(pis, qs), expected, atol=1e-12)


if __name__ == "__main__":
    unittest.main()

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import unittest
import os
import sys

import numpy as np

# 添加 src 目录到 Python 路径
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))

from sor_mql.envs import GuardInvader, MarkovGameModel, Transition, enumerate_model
from sor_mql.errors import ConfigError, DimensionMismatch, NoConvergence
from sor_mql.game import game_value, response_value
from sor_mql.tabular import (
    SorConfig,
    contraction_ratios,
    extract_policy,
    generalized_policy_iteration,
    policy_evaluation_apply,
    random_model,
    run_q_learning,
    self_loop_model,
    sor_bellman_apply,
    sor_q_learning_step,
    step_size,
    value_iteration,
    w_star,
)

SLOW = bool(os.environ.get("SOR_SLOW_TESTS"))


def single_state_model(r: float, gamma: float) -> MarkovGameModel:
    return MarkovGameModel(np.ones((1, 2, 2, 1)), np.full((1, 2, 2), r), gamma)


class TestSorConfig(unittest.TestCase):
    """测试松弛参数与 w*"""

    def test_rejects_w_below_one(self):
        with self.assertRaises(ConfigError):
            SorConfig(0.9, 0.9)
        with self.assertRaises(ConfigError):
            SorConfig(1.0, 1.0)

    def test_contraction_factor(self):
        self.assertAlmostEqual(SorConfig(1.5, 0.95).contraction_factor, 0.925)
        self.assertAlmostEqual(SorConfig(1.0, 0.9).contraction_factor, 0.9)

    def test_w_star(self):
        swap = np.zeros((2, 1, 1, 2))
        swap[0, 0, 0, 1] = swap[1, 0, 0, 0] = 1.0
        self.assertEqual(w_star(MarkovGameModel(swap, np.zeros((2, 1, 1)), 0.9)), 1.0)
        model = self_loop_model(3, 2, 2, 0.95, np.random.default_rng(0))
        self.assertAlmostEqual(w_star(model), 20.0, places=9)

    def test_w_star_scans_diagonal(self):
        model = enumerate_model(GuardInvader(3), gamma=0.9)
        lowest = min(
            model.P[s, a, o, s]
            for s in range(model.n_states)
            for a in range(model.n_actions)
            for o in range(model.n_opponent_actions)
        )
        self.assertEqual(w_star(model), 1.0 / (1.0 - 0.9 * lowest))

    def test_strict_mode(self):
        model = random_model(3, 2, 2, 0.9, np.random.default_rng(1), self_loop=0.3)
        with self.assertRaises(ConfigError):
            value_iteration(model, SorConfig(w_star(model) + 0.5, 0.9, strict=True))
        q, _ = value_iteration(model, SorConfig(w_star(model), 0.9, strict=True))
        self.assertTrue(np.all(np.isfinite(q)))


class TestBellmanOperator(unittest.TestCase):
    """测试 SOR Bellman 算子与值迭代"""

    def setUp(self):
        self.rng = np.random.default_rng(0)

    def test_single_state_fixed_point(self):
        model = single_state_model(0.5, 0.9)
        for w in (1.0, 1.5, 5.0):
            q, _ = value_iteration(model, SorConfig(w, 0.9))
            np.testing.assert_allclose(q, 5.0, atol=1e-8)

    def test_w_one_is_minimax_bellman(self):
        model = random_model(4, 3, 2, 0.9, self.rng)
        q = self.rng.normal(size=(4, 3, 2))
        v = np.array([game_value(q[s]) for s in range(4)])
        expected = model.R + 0.9 * np.einsum("saot,t->sao", model.P, v)
        np.testing.assert_allclose(sor_bellman_apply(model, q, SorConfig(1.0, 0.9)), expected, atol=1e-12)

    def test_dimension_mismatch(self):
        model = random_model(3, 2, 2, 0.9, self.rng)
        with self.assertRaises(DimensionMismatch):
            sor_bellman_apply(model, np.zeros((3, 2, 3)), SorConfig())

    def test_relaxed_fixed_point_matches(self):
        model = random_model(3, 2, 2, 0.9, self.rng, self_loop=0.3)
        base, _ = value_iteration(model, SorConfig(1.0, 0.9))
        relaxed, _ = value_iteration(model, SorConfig(1.2, 0.9))
        np.testing.assert_allclose(relaxed, base, atol=1e-8)

    def test_fixed_point_invariance(self):
        count = 50 if SLOW else 10
        for _ in range(count):
            n_states = int(self.rng.integers(3, 6))
            model = random_model(n_states, 2, 2, 0.9, self.rng)
            base, _ = value_iteration(model, SorConfig(1.0, 0.9))
            relaxed, _ = value_iteration(model, SorConfig(min(1.3, w_star(model)), 0.9))
            self.assertLessEqual(float(np.max(np.abs(base - relaxed))), 1e-7)

    def test_error_ratio_at_w_one(self):
        model = random_model(3, 2, 2, 0.9, self.rng)
        cfg = SorConfig(1.0, 0.9)
        q_star, _ = value_iteration(model, cfg, tol=1e-13)
        q = np.zeros_like(q_star)
        for _ in range(30):
            before = np.max(np.abs(q - q_star))
            q = sor_bellman_apply(model, q, cfg)
            after = np.max(np.abs(q - q_star))
            if before > 1e-2:
                self.assertLessEqual(after / before, 0.9 + 1e-9)

    def test_self_loop_contraction(self):
        model = self_loop_model(3, 2, 2, 0.95, self.rng)
        ratios = contraction_ratios(model, SorConfig(10.0, 0.95), 1000, self.rng)
        self.assertLessEqual(ratios.max(), 0.5 + 1e-6)
        ratios = contraction_ratios(model, SorConfig(1.5, 0.95), 1000, self.rng)
        self.assertLessEqual(ratios.max(), 0.925 + 1e-6)
        ratios = contraction_ratios(model, SorConfig(1.0, 0.95), 1000, self.rng)
        self.assertLessEqual(ratios.max(), 0.95 + 1e-9)
        q, _ = value_iteration(model, SorConfig(10.0, 0.95))
        self.assertTrue(np.all(np.isfinite(q)))

    def test_relaxation_speeds_up_self_loop_models(self):
        for _ in range(5):
            model = self_loop_model(3, 2, 2, 0.95, self.rng)
            history_base, history_fast = [], []
            _, base = value_iteration(model, SorConfig(1.0, 0.95), tol=1e-8, history=history_base)
            _, fast = value_iteration(model, SorConfig(1.5, 0.95), tol=1e-8, history=history_fast)
            self.assertLess(fast, base)
            self.assertEqual(len(history_base), base)

    def test_no_convergence(self):
        model = random_model(3, 2, 2, 0.9, self.rng)
        with self.assertRaises(NoConvergence) as ctx:
            value_iteration(model, SorConfig(1.0, 0.9), tol=1e-12, max_iters=3)
        self.assertEqual(ctx.exception.iterations, 3)
        self.assertGreater(ctx.exception.residual, 1e-12)


class TestPolicies(unittest.TestCase):
    """测试策略提取、策略评估与广义策略迭代"""

    def setUp(self):
        self.rng = np.random.default_rng(2)

    def test_matching_pennies_policy(self):
        q = np.tile(np.array([[1.0, -1.0], [-1.0, 1.0]]), (4, 1, 1))
        np.testing.assert_allclose(extract_policy(q), 0.5, atol=1e-9)

    def test_policy_against_grid_search(self):
        q = self.rng.normal(size=(2, 2, 3))
        pi = extract_policy(q)
        grid = np.linspace(0.0, 1.0, 1001)
        for s in range(2):
            best = max(response_value([p, 1.0 - p], q[s]) for p in grid)
            self.assertAlmostEqual(response_value(pi[s], q[s]), best, delta=2e-3)
            self.assertGreaterEqual(response_value(pi[s], q[s]), best - 1e-9)

    def test_policy_evaluation_with_greedy_policy(self):
        model = random_model(3, 2, 2, 0.9, self.rng, self_loop=0.3)
        cfg = SorConfig(1.2, 0.9)
        q = self.rng.normal(size=(3, 2, 2))
        np.testing.assert_allclose(
            policy_evaluation_apply(model, q, extract_policy(q), cfg), sor_bellman_apply(model, q, cfg), atol=1e-9,
        )
        with self.assertRaises(DimensionMismatch):
            policy_evaluation_apply(model, q, np.full((3, 3), 1.0 / 3.0), cfg)

    def test_gpi_matches_value_iteration(self):
        # 非负奖励保证从 Q = 0 出发时 T Q >= Q
        base = random_model(3, 2, 2, 0.9, self.rng, self_loop=0.3)
        model = MarkovGameModel(base.P, np.abs(base.R), 0.9)
        cfg = SorConfig(1.0, 0.9)
        q_vi, _ = value_iteration(model, cfg)
        for n in (1, 3, 10):
            q_gpi, _ = generalized_policy_iteration(model, cfg, n)
            np.testing.assert_allclose(q_gpi, q_vi, atol=1e-7)

    def test_gpi_single_loop_tracks_value_iteration(self):
        model = random_model(3, 2, 2, 0.9, self.rng)
        cfg = SorConfig(1.0, 0.9)
        vi_history, gpi_history = [], []
        _, vi_iters = value_iteration(model, cfg, tol=1e-8, history=vi_history)
        _, gpi_iters = generalized_policy_iteration(model, cfg, 1, tol=1e-8, history=gpi_history)
        self.assertLessEqual(abs(vi_iters - gpi_iters), 1)
        np.testing.assert_allclose(gpi_history[:10], vi_history[:10], atol=1e-8)


class TestQLearning(unittest.TestCase):
    """测试在线 SOR Q 学习"""

    def setUp(self):
        self.rng = np.random.default_rng(3)
        self.cfg = SorConfig(1.0, 0.9)

    def test_zero_step_size(self):
        q = self.rng.normal(size=(2, 2, 2))
        t = Transition(0, 1, 0, 0.7, 1, False)
        np.testing.assert_array_equal(sor_q_learning_step(q, t, 0.0, self.cfg), q)

    def test_full_replacement(self):
        q = np.array([[[2.0, 1.0], [0.0, 3.0]]])
        t = Transition(0, 0, 1, 0.25, 0, False)
        updated = sor_q_learning_step(q, t, 1.0, self.cfg)
        self.assertAlmostEqual(updated[0, 0, 1], 0.25 + 0.9 * 1.5, places=9)

    def test_touches_one_entry(self):
        q = self.rng.normal(size=(3, 2, 2))
        t = Transition(1, 0, 1, -0.3, 2, False)
        updated = sor_q_learning_step(q, t, 0.5, SorConfig(1.3, 0.9))
        changed = np.argwhere(updated != q)
        self.assertEqual(changed.tolist(), [[1, 0, 1]])

    def test_terminal_next_state_contributes_zero(self):
        q = np.ones((2, 1, 1))
        t = Transition(0, 0, 0, 0.5, 1, True)
        updated = sor_q_learning_step(q, t, 1.0, self.cfg)
        self.assertAlmostEqual(updated[0, 0, 0], 0.5)

    def test_step_size(self):
        self.assertEqual(step_size(0, 60.0, 60.0), 1.0)
        self.assertAlmostEqual(step_size(60, 60.0, 60.0), 0.5)
        with self.assertRaises(ValueError):
            sor_q_learning_step(np.zeros((1, 1, 1)), Transition(0, 0, 0, 0.0, 0, False), 1.5, self.cfg)

    def _converges(self, seed: int, steps: int) -> float:
        model = random_model(3, 2, 2, 0.6, np.random.default_rng(100), self_loop=0.3)
        q_star, _ = value_iteration(model, SorConfig(1.0, 0.6))
        _, curve = run_q_learning(
            model, SorConfig(1.2, 0.6), 60.0, 60.0, steps, np.random.default_rng(seed), q_star, record_every=steps // 10,
        )
        self.assertEqual(curve[0][0], 0)
        self.assertEqual(curve[-1][0], steps)
        return curve[-1][1]

    def test_convergence(self):
        for seed in range(3):
            self.assertLess(self._converges(seed, 60000), 0.05)

    @unittest.skipUnless(SLOW, "设置 SOR_SLOW_TESTS=1 运行")
    def test_convergence_full_scale(self):
        errors = [self._converges(seed, 200000) for seed in range(10)]
        self.assertGreaterEqual(sum(e < 0.05 for e in errors), 9)


if __name__ == "__main__":
    unittest.main()

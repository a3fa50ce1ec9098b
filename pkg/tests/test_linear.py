#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import unittest
import math
import os
import sys

import numpy as np

# 添加 src 目录到 Python 路径
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))

from sor_mql.envs.base import Transition
from sor_mql.errors import DimensionMismatch, InvalidParams, RadiusNonPositive
from sor_mql.linear import (
    BoundParams,
    FeatureMap,
    LinearParams,
    StepSchedule,
    estimate_contraction,
    estimate_noise_bound,
    expected_operator,
    lemma_sequence_check,
    martingale_noise,
    one_hot_features,
    optimal_parameters,
    project_l2,
    proof_bound,
    proof_constants,
    random_features,
    run_linear_experiment,
    sor_linear_update,
    theorem1_bound,
)
from sor_mql.tabular import SorConfig, random_model, sor_q_learning_step, step_size

SLOW = bool(os.environ.get("SOR_SLOW_TESTS"))


def small_model(seed: int = 0, gamma: float = 0.5):
    return random_model(2, 2, 2, gamma, np.random.default_rng(seed))


class TestProjection(unittest.TestCase):
    """测试欧氏球投影与参数校验"""

    def test_inside_ball_unchanged(self):
        theta = np.array([0.3, -0.4])
        np.testing.assert_array_equal(project_l2(theta, 1.0), theta)

    def test_outside_ball_scaled(self):
        out = project_l2([3.0, 4.0], 2.0)
        self.assertAlmostEqual(float(np.linalg.norm(out)), 2.0, places=12)
        np.testing.assert_allclose(out, [1.2, 1.6])

    def test_radius_non_positive(self):
        for radius in (0.0, -1.0):
            with self.assertRaises(RadiusNonPositive):
                project_l2([1.0], radius)
            with self.assertRaises(RadiusNonPositive):
                LinearParams(np.zeros(2), radius)


class TestFeatures(unittest.TestCase):
    """测试特征表"""

    def test_one_hot(self):
        phi = one_hot_features(2, 3, 2)
        self.assertEqual(phi.dim, 12)
        self.assertEqual(tuple(phi.shape), (2, 3, 2))
        theta = np.arange(12.0)
        np.testing.assert_array_equal(phi.q_table(theta), theta.reshape(2, 3, 2))
        np.testing.assert_array_equal(phi.payoff(theta, 1), theta[6:].reshape(3, 2))

    def test_norms_clipped(self):
        phi = FeatureMap(3.0 * np.ones((1, 1, 1, 4)))
        self.assertAlmostEqual(float(np.linalg.norm(phi(0, 0, 0))), 1.0, places=12)
        feats = random_features(3, 2, 2, 5, np.random.default_rng(0))
        norms = np.linalg.norm(feats.table, axis=3)
        self.assertTrue(np.all(norms <= 1.0 + 1e-12))

    def test_bad_table(self):
        with self.assertRaises(DimensionMismatch):
            FeatureMap(np.ones((2, 2, 2)))


class TestRecursion(unittest.TestCase):
    """测试投影递推、期望算子与鞅差噪声"""

    def setUp(self):
        self.model = small_model()
        self.phi = one_hot_features(2, 2, 2)

    def test_one_hot_matches_tabular(self):
        model = random_model(3, 2, 2, 0.8, np.random.default_rng(5), self_loop=0.2)
        phi = one_hot_features(3, 2, 2)
        cfg = SorConfig(1.2, 0.8)
        rng = np.random.default_rng(6)
        q = np.zeros((3, 2, 2))
        params = LinearParams(np.zeros(phi.dim), 1e6)
        triples = model.non_terminal_triples()
        for k in range(10000):
            s, a, o = (int(x) for x in triples[rng.integers(len(triples))])
            tr = model.sample(s, a, o, rng)
            alpha = step_size(k, 40.0, 160.0)
            q = sor_q_learning_step(q, tr, alpha, cfg)
            params = sor_linear_update(params, tr, alpha, cfg, phi)
        np.testing.assert_allclose(params.theta, q.reshape(-1), rtol=0.0, atol=1e-12)

    def test_update_validation(self):
        params = LinearParams(np.zeros(self.phi.dim), 10.0)
        tr = Transition(0, 0, 0, 1.0, 1, False)
        with self.assertRaises(ValueError):
            sor_linear_update(params, tr, 1.5, SorConfig(), self.phi)
        with self.assertRaises(DimensionMismatch):
            sor_linear_update(LinearParams(np.zeros(3), 10.0), tr, 0.5, SorConfig(), self.phi)

    def test_update_stays_in_ball(self):
        params = LinearParams(np.zeros(self.phi.dim), 0.1)
        tr = Transition(0, 1, 0, 1.0, 1, False)
        params = sor_linear_update(params, tr, 1.0, SorConfig(), self.phi)
        self.assertLessEqual(float(np.linalg.norm(params.theta)), 0.1 + 1e-12)

    def test_expected_operator_at_fixed_point(self):
        cfg = SorConfig(1.0, self.model.gamma)
        theta_star = optimal_parameters(self.model, self.phi, cfg)
        n = len(self.model.non_terminal_triples())
        np.testing.assert_allclose(
            expected_operator(theta_star, self.phi, self.model, cfg), theta_star / n, atol=1e-6
        )

    def test_martingale_noise_zero_mean(self):
        cfg = SorConfig(1.3, self.model.gamma)
        theta = np.random.default_rng(1).normal(size=self.phi.dim)
        total = np.zeros(self.phi.dim)
        triples = self.model.non_terminal_triples()
        for s, a, o in triples:
            for s_next in range(self.model.n_states):
                tr = Transition(
                    int(s), int(a), int(o), float(self.model.R[s, a, o]), s_next, bool(self.model.terminal[s_next])
                )
                total += self.model.P[s, a, o, s_next] * martingale_noise(theta, tr, self.phi, self.model, cfg)
        np.testing.assert_allclose(total / len(triples), 0.0, atol=1e-12)

    def test_contraction_estimate(self):
        cfg = SorConfig(1.0, self.model.gamma)
        ratio = estimate_contraction(self.phi, self.model, cfg, 200, np.random.default_rng(2))
        self.assertGreater(ratio, 0.0)
        self.assertLessEqual(ratio, self.model.gamma + 1e-12)

    def test_noise_bound_estimate(self):
        cfg = SorConfig(1.0, self.model.gamma)
        bound = estimate_noise_bound(self.phi, self.model, cfg, 200, np.random.default_rng(3))
        self.assertGreater(bound, 0.0)
        self.assertTrue(math.isfinite(bound))
        self.assertEqual(estimate_noise_bound(self.phi, self.model, cfg, 0, np.random.default_rng(3)), 0.0)

    def test_optimal_parameters_requires_one_hot(self):
        phi = random_features(2, 2, 2, 3, np.random.default_rng(4))
        with self.assertRaises(InvalidParams):
            optimal_parameters(self.model, phi, SorConfig(1.0, 0.5))


class TestBounds(unittest.TestCase):
    """测试误差界的两种形式与步长前提"""

    def params(self, **kw):
        base = dict(noise_bound=1.0, H=32.0, t0=128.0, tau=1, delta=0.1, gamma_prime=0.5, radius=10.0, dim=8, sigma=0.125)
        base.update(kw)
        return BoundParams(**base)

    def test_schedule(self):
        sched = StepSchedule(40.0, 160.0)
        self.assertAlmostEqual(float(sched.alpha(0)), 0.25)
        with self.assertRaises(InvalidParams):
            StepSchedule(0.0, 1.0)
        with self.assertRaises(InvalidParams):
            StepSchedule(40.0, 100.0).check(1, 0.5, 0.9)
        with self.assertRaises(InvalidParams):
            StepSchedule(4.0, 160.0).check(1, 0.125, 0.5)

    def test_params_validation(self):
        with self.assertRaises(InvalidParams):
            self.params(delta=1.5)
        with self.assertRaises(InvalidParams):
            self.params(radius=0.0)
        with self.assertRaises(InvalidParams):
            self.params(noise_bound=-1.0)
        self.assertTrue(self.params().certified())
        self.assertFalse(self.params(t0=10.0).certified())

    def test_proof_form(self):
        p = self.params()
        c = proof_constants(p)
        expected = 4.0 * 1.0 / 0.5 * math.sqrt(32.0 * math.log(2.0 * 8 / 0.1))
        self.assertAlmostEqual(c["c_xi"], expected, places=9)
        self.assertAlmostEqual(c["c_xi_prime"], 4.0 * 10.0 * 129.0 / 0.5, places=9)
        self.assertAlmostEqual(proof_bound(p, 72), c["c_xi"] / math.sqrt(200.0) + c["c_xi_prime"] / 200.0, places=12)

    def test_array_forms_decrease(self):
        p = self.params()
        T = np.arange(0, 5000, 500)
        for curve in (proof_bound(p, T), theorem1_bound(p, T)):
            self.assertEqual(curve.shape, T.shape)
            self.assertTrue(np.all(np.diff(curve) < 0.0))
        self.assertIsInstance(theorem1_bound(p, 100), float)

    def test_check_enforced(self):
        p = self.params(t0=10.0)
        with self.assertRaises(InvalidParams):
            theorem1_bound(p, 100)
        with self.assertRaises(InvalidParams):
            proof_bound(p, 100)
        self.assertGreater(proof_bound(p, 100, check=False), 0.0)


class TestLemmaSequences(unittest.TestCase):
    """测试步长序列不等式"""

    def test_standard_parameters_pass(self):
        report = lemma_sequence_check(40.0, 160.0, 1, 10000 if SLOW else 3000)
        self.assertTrue(report.passed)
        self.assertGreaterEqual(report.beta_slack, 0.0)
        self.assertTrue(report.to_dict()["passed"])

    def test_larger_tau(self):
        self.assertTrue(lemma_sequence_check(40.0, 200.0, 200, 2000).passed)

    def test_invalid_params(self):
        with self.assertRaises(InvalidParams):
            lemma_sequence_check(40.0, 100.0, 1, 1000)
        with self.assertRaises(InvalidParams):
            lemma_sequence_check(10.0, 160.0, 1, 1000)
        with self.assertRaises(InvalidParams):
            lemma_sequence_check(40.0, 160.0, 10, 5)
        with self.assertRaises(InvalidParams):
            lemma_sequence_check(40.0, 160.0, 1, 100, exponent=1.0)


class TestLinearExperiment(unittest.TestCase):
    """测试多种子实验与误差界覆盖率"""

    def test_coverage(self):
        model = small_model(7)
        phi = one_hot_features(2, 2, 2)
        cfg = SorConfig(1.0, 0.5)
        H, t0 = 32.0, 128.0
        noise = estimate_noise_bound(phi, model, cfg, 500, np.random.default_rng(8), radius=10.0)
        p = BoundParams(noise, H, t0, 1, 0.1, 0.5, 10.0, phi.dim, sigma=0.125)
        seeds, T = (range(200), 10000) if SLOW else (range(20), 2000)
        result = run_linear_experiment(model, phi, cfg, StepSchedule(H, t0), p, T, list(seeds))
        self.assertTrue(result.certified)
        self.assertEqual(result.errors.shape, (len(seeds), T + 1))
        np.testing.assert_allclose(result.errors[:, 0], np.max(np.abs(result.theta_star)))
        self.assertGreaterEqual(result.coverage, 0.9)
        self.assertLess(float(np.mean(result.final_errors)), float(np.mean(result.errors[:, 0])))

    def test_deterministic(self):
        model = small_model(9)
        phi = one_hot_features(2, 2, 2)
        cfg = SorConfig(1.0, 0.5)
        p = BoundParams(1.0, 32.0, 128.0, 1, 0.1, 0.5, 10.0, phi.dim, sigma=0.125)
        runs = [run_linear_experiment(model, phi, cfg, p.schedule, p, 200, [3, 4]) for _ in range(2)]
        np.testing.assert_array_equal(runs[0].errors, runs[1].errors)

    def test_uncertified_still_runs(self):
        model = small_model(10)
        phi = one_hot_features(2, 2, 2)
        p = BoundParams(1.0, 2.0, 8.0, 1, 0.1, 0.5, 10.0, phi.dim, sigma=0.125)
        result = run_linear_experiment(model, phi, SorConfig(1.0, 0.5), p.schedule, p, 50, [0])
        self.assertFalse(result.certified)
        self.assertEqual(result.proof_bound.shape, (51,))

    def test_invalid_inputs(self):
        model = small_model()
        phi = one_hot_features(2, 2, 2)
        p = BoundParams(1.0, 32.0, 128.0, 1, 0.1, 0.5, 10.0, phi.dim, sigma=0.125)
        with self.assertRaises(InvalidParams):
            run_linear_experiment(model, phi, SorConfig(1.0, 0.5), p.schedule, p, 10, [])
        with self.assertRaises(InvalidParams):
            run_linear_experiment(model, phi, SorConfig(1.0, 0.5), p.schedule, p, -1, [0])


if __name__ == "__main__":
    unittest.main()

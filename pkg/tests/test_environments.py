#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import unittest
import os
import sys

import numpy as np

# 添加 src 目录到 Python 路径
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))

from sor_mql.envs import (
    GridPos,
    GuardInvader,
    GuardInvaderState,
    MarkovGameModel,
    Soccer,
    SoccerState,
    encode_features,
    enumerate_model,
    gi_step,
    make_env,
    soccer_step,
)
from sor_mql.errors import (
    ConfigError,
    InvalidAction,
    InvalidParams,
    NonFiniteInput,
    StateSpaceTooLarge,
    SteppingTerminalState,
)

UP, DOWN, LEFT, RIGHT, STAY = range(5)
N, S, E, W, STAND = range(5)


def gi_state(guard, invader, n=7):
    return GuardInvaderState(GridPos(*guard), GridPos(*invader), GridPos(n // 2, 0), n)


class TestGuardInvader(unittest.TestCase):
    """测试 Guard-Invader 的转移与奖励"""

    def test_invasion(self):
        tr = gi_step(gi_state((0, 6), (3, 1)), STAY, LEFT)
        self.assertAlmostEqual(tr.r, -10.0 / 12.0)
        self.assertTrue(tr.terminal)
        self.assertEqual(tr.s_next.invader, GridPos(3, 0))

    def test_capture_off_door(self):
        tr = gi_step(gi_state((0, 3), (2, 3)), DOWN, UP)
        self.assertEqual(tr.s_next.guard, tr.s_next.invader)
        self.assertAlmostEqual(tr.r, 5.0 / 12.0)
        self.assertTrue(tr.terminal)

    def test_capture_at_door_counts_as_invasion(self):
        tr = gi_step(gi_state((2, 0), (3, 1)), DOWN, LEFT)
        self.assertAlmostEqual(tr.r, -10.0 / 12.0)
        self.assertTrue(tr.terminal)

    def test_plain_move(self):
        tr = gi_step(gi_state((0, 6), (6, 6)), STAY, STAY)
        self.assertEqual(tr.r, 0.0)
        self.assertFalse(tr.terminal)

    def test_off_grid_move_is_stay(self):
        tr = gi_step(gi_state((0, 0), (6, 6)), UP, "right")
        self.assertEqual(tr.s_next.guard, GridPos(0, 0))
        self.assertEqual(tr.s_next.invader, GridPos(6, 6))

    def test_errors(self):
        with self.assertRaises(InvalidAction):
            gi_step(gi_state((0, 0), (6, 6)), "jump", STAY)
        with self.assertRaises(InvalidAction):
            gi_step(gi_state((0, 0), (6, 6)), STAY, 5)
        with self.assertRaises(SteppingTerminalState):
            gi_step(gi_state((1, 1), (1, 1)), STAY, STAY)

    def test_rewards_normalized(self):
        env = GuardInvader(11)
        rng = np.random.default_rng(0)
        for state in env.states()[:2000]:
            if state.terminal:
                continue
            tr = gi_step(state, int(rng.integers(5)), int(rng.integers(5)))
            self.assertLessEqual(abs(tr.r), 1.0)

    def test_encoding(self):
        np.testing.assert_allclose(encode_features(gi_state((0, 0), (6, 6))), [0, 0, 1, 1, 0.5, 0])
        self.assertEqual(encode_features(gi_state((1, 2), (3, 4))).shape, (6,))


class TestSoccer(unittest.TestCase):
    """测试 Soccer 的转移与球权规则"""

    def setUp(self):
        self.rng = np.random.default_rng(0)

    def test_a_scores(self):
        state = SoccerState(GridPos(1, 1), GridPos(0, 0), True, 3)
        for _ in range(10):
            tr = soccer_step(state, E, STAND, self.rng)
            self.assertEqual(tr.r, 1.0)
            self.assertTrue(tr.terminal)

    def test_b_scores(self):
        state = SoccerState(GridPos(2, 2), GridPos(1, 1), False, 3)
        for _ in range(10):
            tr = soccer_step(state, STAND, W, self.rng)
            self.assertEqual(tr.r, -1.0)
            self.assertTrue(tr.terminal)

    def test_bump_transfers_possession(self):
        state = SoccerState(GridPos(1, 1), GridPos(1, 2), False, 3)
        for _ in range(10):
            tr = soccer_step(state, E, STAND, self.rng)
            self.assertEqual(tr.r, 0.0)
            self.assertFalse(tr.terminal)
            self.assertTrue(tr.s_next.ball_with_a)
            self.assertEqual(tr.s_next.pos_a, GridPos(1, 1))
            self.assertEqual(tr.s_next.pos_b, GridPos(1, 2))

    def test_errors(self):
        state = SoccerState(GridPos(1, 1), GridPos(0, 0), True, 3)
        with self.assertRaises(InvalidAction):
            soccer_step(state, "up", STAND, self.rng)
        with self.assertRaises(SteppingTerminalState):
            soccer_step(SoccerState(GridPos(1, 1), GridPos(1, 1), True, 3), N, N, self.rng)

    def test_encoding(self):
        x = encode_features(SoccerState(GridPos(0, 6), GridPos(3, 3), True, 7))
        np.testing.assert_allclose(x, [0.0, 1.0, 0.5, 0.5, 1.0])
        self.assertEqual(encode_features(SoccerState(GridPos(0, 6), GridPos(3, 3), False, 7))[-1], 0.0)

    def test_initial_states_distinct(self):
        env = Soccer(7)
        for _ in range(50):
            state = env.reset(self.rng)
            self.assertNotEqual(state.pos_a, state.pos_b)

    def test_initial_states_cover_grid(self):
        env = Soccer(3)
        seen = set()
        for _ in range(2000):
            state = env.initial_state(self.rng)
            seen.add(state.pos_a)
            seen.add(state.pos_b)
        self.assertEqual(seen, set(env.cells()))


class TestEpisodes(unittest.TestCase):
    """测试回合推进、截断与随机对局的终止"""

    def test_truncation(self):
        env = GuardInvader(7, max_episode_steps=1)
        rng = np.random.default_rng(0)
        env.reset(rng)
        env.state = gi_state((0, 6), (6, 6))
        tr = env.step(STAY, STAY, rng)
        self.assertTrue(tr.truncated)
        self.assertFalse(tr.terminal)
        with self.assertRaises(SteppingTerminalState):
            env.step(STAY, STAY, rng)

    def test_random_play_terminates(self):
        rng = np.random.default_rng(1)
        for n in (3, 4):
            env = GuardInvader(n, max_episode_steps=500)
            truncated = 0
            episodes = 300
            for _ in range(episodes):
                env.reset(rng)
                while True:
                    tr = env.step(int(rng.integers(5)), int(rng.integers(5)), rng)
                    if tr.terminal or tr.truncated:
                        truncated += int(tr.truncated)
                        break
            self.assertLessEqual(truncated / episodes, 0.01)

    def test_make_env(self):
        self.assertIsInstance(make_env("soccer", 5), Soccer)
        self.assertIsInstance(make_env("guard-invader", 5), GuardInvader)
        with self.assertRaises(ConfigError):
            make_env("chess")
        with self.assertRaises(InvalidParams):
            Soccer(2)
        with self.assertRaises(TypeError):
            encode_features("state")


class TestEnumerateModel(unittest.TestCase):
    """测试模型枚举"""

    def test_model_validation(self):
        P = np.ones((1, 2, 2, 1))
        with self.assertRaises(NonFiniteInput):
            MarkovGameModel(P, np.full((1, 2, 2), np.nan), 0.9)
        with self.assertRaises(InvalidParams):
            MarkovGameModel(0.5 * P, np.zeros((1, 2, 2)), 0.9)
        with self.assertRaises(InvalidParams):
            MarkovGameModel(P, np.zeros((1, 2, 2)), 1.0)

    def test_guard_invader_3x3(self):
        model = enumerate_model(GuardInvader(3))
        self.assertEqual(model.n_states, 82)
        np.testing.assert_allclose(model.P.sum(axis=3), 1.0, atol=1e-12)
        self.assertTrue(np.all((model.P == 0.0) | (model.P == 1.0)))
        sink = model.n_states - 1
        self.assertTrue(model.terminal[sink])
        self.assertTrue(np.all(model.R[model.terminal] == 0.0))

    def test_soccer_3x3_mixtures(self):
        model = enumerate_model(Soccer(3))
        np.testing.assert_allclose(model.P.sum(axis=3), 1.0, atol=1e-12)
        nonzero = model.P[~model.terminal] > 0.0
        self.assertTrue(np.all(nonzero.sum(axis=-1) <= 2))
        values = np.unique(model.P[~model.terminal][nonzero])
        self.assertTrue(set(values.tolist()) <= {0.5, 1.0})

    def test_monte_carlo_agreement(self):
        env = Soccer(3)
        model = enumerate_model(env)
        index = {s: i for i, s in enumerate(model.states[:-1])}
        sink = model.n_states - 1
        rng = np.random.default_rng(2)
        for _ in range(3):
            i = int(rng.integers(sink))
            a, o = int(rng.integers(5)), int(rng.integers(5))
            counts = np.zeros(model.n_states)
            for _ in range(10000):
                tr = soccer_step(model.states[i], a, o, rng)
                counts[sink if tr.terminal else index[tr.s_next]] += 1
            np.testing.assert_allclose(counts / 10000, model.P[i, a, o], atol=0.02)

    def test_state_cap(self):
        with self.assertRaises(StateSpaceTooLarge):
            enumerate_model(GuardInvader(7), state_cap=1000)


if __name__ == "__main__":
    unittest.main()

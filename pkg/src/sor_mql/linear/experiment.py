#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
线性逼近递推的多种子实验：误差曲线 xi_t 与误差界曲线
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..envs.base import MarkovGameModel, Transition
from ..errors import InvalidParams
from ..tabular import SorConfig, check_relaxation, value_iteration
from ..utils.logger import get_logger, log_function_call
from .bound import BoundParams, StepSchedule, proof_bound, theorem1_bound
from .features import FeatureMap
from .recursion import LinearParams, sor_linear_update

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class LinearExperimentResult:
    """errors 形状 (种子数, T + 1)，第 t 列是 xi_t = ||theta_t - theta*||_inf"""

    seeds: Sequence[int]
    errors: np.ndarray
    proof_bound: np.ndarray
    theorem_bound: np.ndarray
    certified: bool
    theta_star: np.ndarray

    @property
    def final_errors(self) -> np.ndarray:
        return self.errors[:, -1]

    @property
    def coverage(self) -> float:
        """xi_T <= 证明形式界的种子比例"""
        return float(np.mean(self.final_errors <= self.proof_bound[-1]))

    @property
    def statement_coverage(self) -> float:
        return float(np.mean(self.final_errors <= self.theorem_bound[-1]))


def optimal_parameters(model: MarkovGameModel, phi: FeatureMap, cfg: SorConfig) -> np.ndarray:
    """指示特征下 theta* 就是展开后的 Q*"""
    if not phi.one_hot:
        raise InvalidParams("只有指示特征能精确给出 theta*")
    q_star, _ = value_iteration(model, SorConfig(1.0, cfg.gamma))
    return q_star.reshape(-1)


def run_seed(
    model: MarkovGameModel,
    phi: FeatureMap,
    cfg: SorConfig,
    schedule: StepSchedule,
    radius: float,
    T: int,
    theta_star: np.ndarray,
    rng: np.random.Generator,
    theta0: Optional[np.ndarray] = None,
) -> np.ndarray:
    """单个种子的递推，返回 xi_0..xi_T"""
    triples = model.non_terminal_triples()
    params = LinearParams(np.zeros(phi.dim) if theta0 is None else theta0, radius)
    cumulative = np.cumsum(model.P, axis=3)
    errors = np.empty(T + 1)
    errors[0] = float(np.max(np.abs(params.theta - theta_star)))
    for t in range(T):
        s, a, o = (int(x) for x in triples[rng.integers(len(triples))])
        s_next = min(int(np.searchsorted(cumulative[s, a, o], rng.random(), side="right")), model.n_states - 1)
        tr = Transition(s, a, o, float(model.R[s, a, o]), s_next, bool(model.terminal[s_next]))
        alpha = min(1.0, float(schedule.alpha(t)))
        params = sor_linear_update(params, tr, alpha, cfg, phi)
        errors[t + 1] = float(np.max(np.abs(params.theta - theta_star)))
    return errors


@log_function_call
def run_linear_experiment(
    model: MarkovGameModel,
    phi: FeatureMap,
    cfg: SorConfig,
    schedule: StepSchedule,
    p: BoundParams,
    T: int,
    seeds: Sequence[int],
    theta_star: Optional[np.ndarray] = None,
) -> LinearExperimentResult:
    """逐种子运行递推，同时给出两种形式的误差界曲线

    步长前提不成立时仍然计算界曲线，但 certified 为 False。
    """
    if T < 0:
        raise InvalidParams("T 不能为负")
    if not seeds:
        raise InvalidParams("至少需要一个种子")
    check_relaxation(model, cfg)
    if model.non_terminal_triples().size == 0:
        raise InvalidParams("模型没有非终止的 (s, a, o)")
    if theta_star is None:
        theta_star = optimal_parameters(model, phi, cfg)

    certified = p.certified()
    if not certified:
        logger.warning("步长参数不满足误差界前提，界曲线仅供参考")
    horizon = np.arange(T + 1)
    bound_proof = np.asarray(proof_bound(p, horizon, check=False), dtype=float)
    bound_statement = np.asarray(theorem1_bound(p, horizon, check=False), dtype=float)

    curves = np.empty((len(seeds), T + 1))
    for i, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        curves[i] = run_seed(model, phi, cfg, schedule, p.radius, T, theta_star, rng)
        logger.debug(f"种子 {seed}: xi_T = {curves[i, -1]:.4g}")

    result = LinearExperimentResult(list(seeds), curves, bound_proof, bound_statement, certified, theta_star)
    logger.info(f"线性逼近实验完成: {len(seeds)} 个种子，覆盖率 {result.coverage:.3f}")
    return result

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
有限时间误差界及其步长序列引理的数值检查

步长 alpha_t = H / (t + t0)，
beta_{h,t} = prod_{l=h+1}^{t} (1 - alpha_l)，beta~_{h,t} = alpha_h beta_{h,t}。
"""

import math
from dataclasses import asdict, dataclass
from typing import Dict, Union

import numpy as np

from ..errors import InequalityViolated, InvalidParams
from ..utils.logger import get_logger

logger = get_logger(__name__)

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class StepSchedule:
    """alpha_t = H / (t + t0)"""

    H: float
    t0: float

    def __post_init__(self):
        if not (self.H > 0 and self.t0 > 0):
            raise InvalidParams(f"H 与 t0 必须为正，得到 H={self.H}, t0={self.t0}")

    def alpha(self, t: ArrayLike) -> ArrayLike:
        return self.H / (np.asarray(t, dtype=float) + self.t0)

    def check(self, tau: int, sigma: float, gamma_prime: float) -> None:
        """t0 >= max(4H, tau) 且 H >= 2 / (sigma (1 - gamma'))"""
        if self.t0 < max(4.0 * self.H, tau):
            raise InvalidParams(f"需要 t0 >= max(4H, tau)，得到 t0={self.t0}, H={self.H}, tau={tau}")
        need = 2.0 / (sigma * (1.0 - gamma_prime))
        if self.H < need * (1.0 - 1e-12):
            raise InvalidParams(f"需要 H >= 2/(sigma(1-gamma')) = {need:.6g}，得到 H={self.H}")


@dataclass(frozen=True)
class BoundParams:
    """误差界的全部常数

    Attributes:
        noise_bound: 鞅差噪声上界 M~
        H, t0: 步长常数
        tau: 混合常数
        delta: 失败概率
        gamma_prime: F 的收缩因子
        radius: 投影半径 Z
        dim: 特征维度 d
        sigma: 访问频率下界
    """

    noise_bound: float
    H: float
    t0: float
    tau: int
    delta: float
    gamma_prime: float
    radius: float
    dim: int
    sigma: float = 0.5

    def __post_init__(self):
        positive = {k: v for k, v in asdict(self).items() if k != "noise_bound"}
        bad = [k for k, v in positive.items() if not v > 0]
        if bad or self.noise_bound < 0:
            raise InvalidParams(f"界参数必须为正: {bad or ['noise_bound']}")
        for name in ("delta", "gamma_prime", "sigma"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise InvalidParams(f"{name} 必须在 (0, 1) 内，得到 {getattr(self, name)}")

    @property
    def schedule(self) -> StepSchedule:
        return StepSchedule(self.H, self.t0)

    def certified(self) -> bool:
        """步长前提是否成立"""
        try:
            self.schedule.check(self.tau, self.sigma, self.gamma_prime)
        except InvalidParams:
            return False
        return True


def theorem1_bound(p: BoundParams, T: ArrayLike, check: bool = True) -> ArrayLike:
    """定理陈述中的界

    4 M~ sqrt(H log(1/delta)) / ((1 - delta) sqrt(T + t0)) + 4 Z (tau + t0) / ((1 - gamma') (T + t0))
    """
    if check:
        p.schedule.check(p.tau, p.sigma, p.gamma_prime)
    span = np.asarray(T, dtype=float) + p.t0
    noise = 4.0 * p.noise_bound * math.sqrt(p.H * math.log(1.0 / p.delta)) / ((1.0 - p.delta) * np.sqrt(span))
    bias = 4.0 * p.radius * (p.tau + p.t0) / ((1.0 - p.gamma_prime) * span)
    result = noise + bias
    return float(result) if np.ndim(result) == 0 else result


def proof_constants(p: BoundParams) -> Dict[str, float]:
    """证明内部的 C_xi 与 C'_xi"""
    c_xi = 4.0 * p.noise_bound / (1.0 - p.gamma_prime) * math.sqrt(p.H * math.log(2.0 * p.dim / p.delta))
    c_xi_prime = 4.0 * p.radius * (p.tau + p.t0) / (1.0 - p.gamma_prime)
    return {"c_xi": c_xi, "c_xi_prime": c_xi_prime}


def proof_bound(p: BoundParams, T: ArrayLike, check: bool = True) -> ArrayLike:
    """证明内部形式 C_xi / sqrt(T + t0) + C'_xi / (T + t0)"""
    if check:
        p.schedule.check(p.tau, p.sigma, p.gamma_prime)
    c = proof_constants(p)
    span = np.asarray(T, dtype=float) + p.t0
    result = c["c_xi"] / np.sqrt(span) + c["c_xi_prime"] / span
    return float(result) if np.ndim(result) == 0 else result


@dataclass(frozen=True)
class LemmaReport:
    """三条序列不等式的最小相对余量（非负即成立）"""

    H: float
    t0: float
    tau: int
    horizon: int
    gamma_prime: float
    exponent: float
    beta_slack: float
    square_sum_slack: float
    weighted_sum_slack: float

    @property
    def passed(self) -> bool:
        return min(self.beta_slack, self.square_sum_slack, self.weighted_sum_slack) >= 0.0

    def to_dict(self) -> Dict[str, float]:
        data = asdict(self)
        data["passed"] = self.passed
        return data


def lemma_sequence_check(
    H: float,
    t0: float,
    tau: int,
    horizon: int,
    gamma_prime: float = 0.9,
    exponent: float = 0.999,
    raise_on_violation: bool = True,
) -> LemmaReport:
    """对 t = tau..horizon 逐一验证

    1. beta_{h,t} <= ((h+1+t0)/(t+1+t0))^H，tau-1 <= h < t
    2. sum_{h=tau}^{t} beta~_{h,t}^2 <= 2H/(t+1+t0)
    3. sum_{h=tau}^{t} beta~_{h,t} / (h+t0)^G <= 1/(sqrt(gamma')(t+1+t0)^G)，0 < G < 1

    Raises:
        InvalidParams: 前提 t0 >= max(4H, tau)、H(1 - sqrt(gamma')) >= 1 不成立
        InequalityViolated: 某条不等式出现负余量
    """
    if tau < 1 or horizon < tau:
        raise InvalidParams(f"需要 1 <= tau <= horizon，得到 tau={tau}, horizon={horizon}")
    if not 0.0 < exponent < 1.0:
        raise InvalidParams(f"指数必须在 (0, 1) 内，得到 {exponent}")
    if not 0.0 < gamma_prime < 1.0:
        raise InvalidParams(f"gamma' 必须在 (0, 1) 内，得到 {gamma_prime}")
    schedule = StepSchedule(H, t0)
    if t0 < max(4.0 * H, tau):
        raise InvalidParams(f"需要 t0 >= max(4H, tau)，得到 t0={t0}, H={H}, tau={tau}")
    if H * (1.0 - math.sqrt(gamma_prime)) < 1.0:
        raise InvalidParams(f"需要 H(1 - sqrt(gamma')) >= 1，得到 {H * (1.0 - math.sqrt(gamma_prime)):.6g}")

    steps = np.arange(tau - 1, horizon + 1)
    alpha = schedule.alpha(steps)
    # log beta_{h,t} = L[t] - L[h]
    log_keep = np.cumsum(np.log1p(-alpha))
    drift = log_keep + H * np.log(steps + 1.0 + t0)
    # 对每个 t 取 h < t 上 drift 的最小值
    running_min = np.minimum.accumulate(drift)[:-1]
    beta_gap = running_min - drift[1:]
    beta_slack = float(np.min(-np.expm1(-beta_gap)))

    square_sum = 0.0
    weighted_sum = 0.0
    square_slack = math.inf
    weighted_slack = math.inf
    for t in range(tau, horizon + 1):
        a = H / (t + t0)
        square_sum = (1.0 - a) ** 2 * square_sum + a * a
        weighted_sum = (1.0 - a) * weighted_sum + a / (t + t0) ** exponent
        square_slack = min(square_slack, 1.0 - square_sum / (2.0 * H / (t + 1.0 + t0)))
        rhs = 1.0 / (math.sqrt(gamma_prime) * (t + 1.0 + t0) ** exponent)
        weighted_slack = min(weighted_slack, 1.0 - weighted_sum / rhs)

    report = LemmaReport(
        H, t0, tau, horizon, gamma_prime, exponent,
        beta_slack, float(square_slack), float(weighted_slack),
    )
    logger.debug(f"序列不等式检查: {report}")
    if raise_on_violation and not report.passed:
        raise InequalityViolated(f"序列不等式出现负余量: {report.to_dict()}")
    return report

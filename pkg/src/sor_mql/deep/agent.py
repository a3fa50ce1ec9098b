#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
深度 SOR 极小极大 Q 学习

在线网络 theta_t 负责行动并接受梯度；目标网络 theta_target 每 T 步同步一次，
评估网络 theta_eval 每 nT 步同步一次，pi_eval = K(q(.|theta_eval)) 按状态缓存。
目标值 y = w (r + gamma min_o' pi_eval(s')^T q(s'|theta_target)) + (1 - w) min_o pi_eval(s)^T q(s|theta_target)。
"""

import json
import math
from collections import deque
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..envs import GridGame, Transition, encode_features
from ..errors import ConfigError, DimensionMismatch, NonFiniteInput, NumericalDivergence
from ..game import batch_response_values, best_response_column, game_value, solve_matrix_game
from ..utils.logger import get_logger, log_function_call
from .mlp import DEFAULT_HIDDEN, MlpParams, init_mlp, mlp_forward, mlp_forward_batch, mlp_gradient, pair_index
from .optim import make_optimizer
from .replay import ReplayBuffer

logger = get_logger(__name__)

LOSS_WINDOW = 100

LOG_COLUMNS = ("step", "episode", "loss_raw", "loss_ma100", "probe_minimax_q", "epsilon", "seed", "w")


@dataclass(frozen=True)
class AlgoConfig:
    """训练超参数"""

    w: float = 1.2
    gamma: float = 0.95
    target_period: int = 100
    eval_loops: int = 5
    batch_size: int = 64
    learning_rate: float = 5e-5
    eps_start: float = 1.0
    eps_end: float = 0.1
    eps_decay: float = 20000.0
    optimizer: str = "adam"
    hidden: Tuple[int, ...] = DEFAULT_HIDDEN
    buffer_capacity: int = 10000
    probe_states: int = 32
    probe_every: int = 100
    seed: int = 0
    baseline: bool = False

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if self.w < 1.0:
            raise ConfigError(f"松弛参数 w 必须 >= 1，得到 {self.w}")
        if not 0.0 < self.gamma < 1.0:
            raise ConfigError(f"gamma 必须在 (0, 1) 内，得到 {self.gamma}")
        positive = ("target_period", "eval_loops", "batch_size", "learning_rate", "eps_decay", "buffer_capacity", "probe_every")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} 必须为正，得到 {getattr(self, name)}")
        if not 0.0 <= self.eps_end <= self.eps_start <= 1.0:
            raise ConfigError("需要 0 <= eps_end <= eps_start <= 1")
        if self.batch_size > self.buffer_capacity:
            raise ConfigError("批量大小不能超过回放容量")
        if self.probe_states < 0 or any(h < 1 for h in self.hidden):
            raise ConfigError("probe_states 不能为负，隐藏层宽度至少为 1")
        if self.optimizer not in ("adam", "sgd"):
            raise ConfigError(f"未知的优化器: {self.optimizer}")

    @classmethod
    def from_config(cls, config: Mapping[str, Any], **overrides) -> "AlgoConfig":
        """从扁平配置字典中取出训练相关的键"""
        names = set(cls.__dataclass_fields__)
        values = {k: v for k, v in config.items() if k in names}
        values.update(overrides)
        return cls(**values)

    @property
    def eval_period(self) -> int:
        return self.target_period * self.eval_loops


def epsilon(t: int, cfg: AlgoConfig) -> float:
    """eps(t) = eps_end + (eps_start - eps_end) exp(-t / decay)"""
    return cfg.eps_end + (cfg.eps_start - cfg.eps_end) * math.exp(-t / cfg.eps_decay)


class FeatureCache:
    """状态到网络输入的缓存，一次运行内编码固定"""

    def __init__(self, encode: Callable[[Any], np.ndarray] = encode_features):
        self._encode = encode
        self._cache: Dict[Any, np.ndarray] = {}

    def __call__(self, state) -> np.ndarray:
        x = self._cache.get(state)
        if x is None:
            x = self._encode(state)
            self._cache[state] = x
        return x

    def batch(self, states: Sequence[Any]) -> np.ndarray:
        return np.stack([self(s) for s in states])


@dataclass
class TrainState:
    """三组网络参数、步数与 pi_eval 缓存"""

    online: MlpParams
    target: MlpParams
    evaluation: MlpParams
    t: int = 0
    eval_cache: Dict[Any, np.ndarray] = field(default_factory=dict)

    def eval_policy(self, state, features: Callable[[Any], np.ndarray]) -> np.ndarray:
        """pi_eval(s) = K(q(s|theta_eval))"""
        pi = self.eval_cache.get(state)
        if pi is None:
            pi = solve_matrix_game(mlp_forward(self.evaluation, features(state))).strategy
            self.eval_cache[state] = pi
        return pi

    def sync(self, cfg: AlgoConfig) -> Tuple[bool, bool]:
        """第 t 步更新之后的同步；返回 (目标网络是否刷新, 评估网络是否刷新)"""
        refresh_target = self.t % cfg.target_period == 0
        refresh_eval = self.t % cfg.eval_period == 0
        if refresh_target:
            self.target = self.online.copy()
        if refresh_eval:
            self.evaluation = self.online.copy()
            self.eval_cache.clear()
        return refresh_target, refresh_eval


def _response_terms(
    batch: Sequence[Transition],
    target: MlpParams,
    pi_eval: Callable[[Any], np.ndarray],
    features: Callable[[Any], np.ndarray],
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    rewards = np.array([t.r for t in batch], dtype=float)
    terminal = np.array([t.terminal for t in batch], dtype=bool)
    here = [t.s for t in batch]
    after = [t.s_next for t in batch]
    q_here = mlp_forward_batch(target, np.stack([features(s) for s in here]))
    q_next = mlp_forward_batch(target, np.stack([features(s) for s in after]))
    resp_here = batch_response_values(np.stack([pi_eval(s) for s in here]), q_here)
    resp_next = batch_response_values(np.stack([pi_eval(s) for s in after]), q_next)
    # 截断不算终止，照常自举
    resp_next = np.where(terminal, 0.0, resp_next)
    return rewards, terminal, resp_here, resp_next


def compute_target(
    batch: Sequence[Transition],
    target: MlpParams,
    pi_eval: Callable[[Any], np.ndarray],
    cfg: AlgoConfig,
    features: Callable[[Any], np.ndarray] = encode_features,
) -> np.ndarray:
    """SOR 目标向量 y"""
    rewards, _, resp_here, resp_next = _response_terms(batch, target, pi_eval, features)
    return cfg.w * (rewards + cfg.gamma * resp_next) + (1.0 - cfg.w) * resp_here


def minimax_target(
    batch: Sequence[Transition],
    target: MlpParams,
    pi_eval: Callable[[Any], np.ndarray],
    cfg: AlgoConfig,
    features: Callable[[Any], np.ndarray] = encode_features,
) -> np.ndarray:
    """不含 w 的基线目标 y = r + gamma min_o' pi_eval(s')^T q(s'|theta_target)"""
    rewards, _, _, resp_next = _response_terms(batch, target, pi_eval, features)
    return rewards + cfg.gamma * resp_next


def select_action(features: np.ndarray, online: MlpParams, eps: float, rng: np.random.Generator) -> int:
    """以 1 - eps 的概率按 K(q(s|theta_t)) 的混合策略采样，否则均匀随机"""
    if rng.random() < eps:
        return int(rng.integers(online.n_actions))
    strategy = solve_matrix_game(mlp_forward(online, features)).strategy
    return int(rng.choice(online.n_actions, p=strategy))


def opponent_action(features: np.ndarray, online: MlpParams, pi_eval: np.ndarray) -> int:
    """对 pi_eval 的最优反应，收益矩阵取在线网络的输出"""
    return best_response_column(pi_eval, mlp_forward(online, features))


@dataclass
class TrainResult:
    rows: List[Dict[str, Any]]
    state: TrainState
    episodes: int

    def converged_loss(self, fraction: float = 0.1) -> float:
        """最后 fraction 比例梯度步的平均原始损失"""
        losses = [r["loss_raw"] for r in self.rows]
        if not losses:
            return float("nan")
        tail = max(1, int(math.ceil(len(losses) * fraction)))
        return float(np.mean(losses[-tail:]))


def _probe_value(params: MlpParams, probe: np.ndarray) -> float:
    if probe.shape[0] == 0:
        return float("nan")
    matrices = mlp_forward_batch(params, probe)
    return float(np.mean([game_value(q) for q in matrices]))


@log_function_call
def train(
    env: GridGame,
    cfg: AlgoConfig,
    steps: int,
    callback: Optional[Callable[[TrainState], None]] = None,
    on_transition: Optional[Callable[[int, int, Transition], None]] = None,
) -> TrainResult:
    """运行 steps 个环境步

    每步: 按 eps-greedy 选 a，对手对 pi_eval 做最优反应选 o，存入回放；
    缓冲区够一个批量后采样、计算目标并做一次梯度下降；随后按周期同步目标网络与评估网络。
    日志每个梯度步一行。on_transition(t, episode, transition) 在每个环境步之后调用。

    Raises:
        NumericalDivergence: 损失或参数出现 NaN / inf
    """
    if steps < 0:
        raise ConfigError("steps 不能为负")
    env_seq, act_seq, replay_seq, init_seq, probe_seq = np.random.SeedSequence(cfg.seed).spawn(5)
    env_rng = np.random.default_rng(env_seq)
    act_rng = np.random.default_rng(act_seq)
    replay_rng = np.random.default_rng(replay_seq)
    probe_rng = np.random.default_rng(probe_seq)

    features = FeatureCache()
    online = init_mlp(env.feature_dim, env.n_actions, env.n_opponent_actions, np.random.default_rng(init_seq), cfg.hidden)
    state = TrainState(online, online.copy(), online.copy())
    optimizer = make_optimizer(cfg.optimizer, cfg.learning_rate)
    buffer = ReplayBuffer(cfg.buffer_capacity)
    make_target = minimax_target if cfg.baseline else compute_target

    probe = np.stack([features(env.initial_state(probe_rng)) for _ in range(cfg.probe_states)]) if cfg.probe_states else np.zeros((0, env.feature_dim))
    probe_q = _probe_value(state.online, probe)

    rows: List[Dict[str, Any]] = []
    window: deque = deque(maxlen=LOSS_WINDOW)
    episode = 0
    s = env.reset(env_rng)

    def pi_eval(st):
        return state.eval_policy(st, features)

    try:
        for t in range(1, steps + 1):
            state.t = t
            x = features(s)
            eps = epsilon(t - 1, cfg)
            a = select_action(x, state.online, eps, act_rng)
            o = opponent_action(x, state.online, pi_eval(s))
            tr = env.step(a, o, env_rng)
            buffer.add(tr)
            if on_transition is not None:
                on_transition(t, episode, tr)

            if buffer.can_sample(cfg.batch_size):
                batch = buffer.sample(cfg.batch_size, replay_rng)
                y = make_target(batch, state.target, pi_eval, cfg, features)
                inputs = features.batch([b.s for b in batch])
                pairs = pair_index(state.online, [b.a for b in batch], [b.o for b in batch])
                loss, grads = mlp_gradient(state.online, inputs, pairs, y)
                if not math.isfinite(loss):
                    raise NumericalDivergence(f"第 {t} 步损失变为 {loss}", t)
                state.online = optimizer.update(state.online, grads)
                if not state.online.is_finite():
                    raise NumericalDivergence(f"第 {t} 步参数出现非有限值", t)
                window.append(loss)
                if t % cfg.probe_every == 0 or not rows:
                    probe_q = _probe_value(state.online, probe)
                rows.append({
                    "step": t,
                    "episode": episode,
                    "loss_raw": loss,
                    "loss_ma100": float(np.mean(window)),
                    "probe_minimax_q": probe_q,
                    "epsilon": eps,
                    "seed": cfg.seed,
                    "w": cfg.w,
                })

            state.sync(cfg)
            if callback is not None:
                callback(state)

            if tr.terminal or tr.truncated:
                episode += 1
                s = env.reset(env_rng)
            else:
                s = tr.s_next
    except NonFiniteInput as exc:
        # 网络输出溢出时矩阵博弈求解先报错
        raise NumericalDivergence(f"第 {state.t} 步网络输出出现非有限值", state.t) from exc

    if rows:
        logger.info(f"训练结束: {steps} 步，{episode} 个回合，最终损失 {rows[-1]['loss_raw']:.4g}")
    return TrainResult(rows, state, episode)


def save_weights(params: MlpParams, path: Path) -> Tuple[Path, Path]:
    """参数写成小端 float64 扁平二进制，并在旁边写 JSON 形状清单

    Returns:
        (二进制路径, 清单路径)
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    manifest_path = path.with_suffix(".json")
    path.write_bytes(params.flatten().astype("<f8").tobytes())
    manifest = {
        "dtype": "<f8",
        "n_actions": params.n_actions,
        "n_opponent_actions": params.n_opponent_actions,
        "layers": [{"weight": list(w.shape), "bias": list(b.shape)} for w, b in zip(params.weights, params.biases)],
    }
    with open(manifest_path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    return path, manifest_path


def load_weights(path: Path) -> MlpParams:
    """读取 save_weights 写出的参数"""
    path = Path(path)
    with open(path.with_suffix(".json"), "r", encoding="utf-8") as f:
        manifest = json.load(f)
    flat = np.frombuffer(path.read_bytes(), dtype=manifest.get("dtype", "<f8")).astype(float)
    weights, biases = [], []
    offset = 0
    for layer in manifest["layers"]:
        w_shape, b_shape = tuple(layer["weight"]), tuple(layer["bias"])
        w_size, b_size = int(np.prod(w_shape)), int(np.prod(b_shape))
        weights.append(flat[offset:offset + w_size].reshape(w_shape).copy())
        offset += w_size
        biases.append(flat[offset:offset + b_size].reshape(b_shape).copy())
        offset += b_size
    if offset != flat.size:
        raise DimensionMismatch(f"权重文件长度 {flat.size} 与清单 {offset} 不一致")
    return MlpParams(tuple(weights), tuple(biases), manifest["n_actions"], manifest["n_opponent_actions"])


def algo_config_dict(cfg: AlgoConfig) -> Dict[str, Any]:
    data = asdict(cfg)
    data["hidden"] = list(cfg.hidden)
    return data

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Configuration management for sor_mql experiments.

The configuration is one flat JSON object. Every key lives in DEFAULT_CONFIG
with the type of its default; files and CLI flags may only override known keys.
"""

import os
import json
import hashlib
from pathlib import Path
from typing import Dict, Any, Optional, Mapping

from .errors import ConfigError
from .utils.logger import get_logger

logger = get_logger(__name__)

# Default configuration (flat, typed). Comments document each key.
DEFAULT_CONFIG: Dict[str, Any] = {
    "env": "guard-invader",      # guard-invader | soccer
    "grid": 7,                   # grid side n (7 -> GI-49/S-49, 11 -> GI-121/S-121)
    "algorithm": "deep",         # tabular-vi | tabular-ql | linear-fa | deep
    "w": 1.2,                    # relaxation parameter for single runs
    "w_list": [1.0, 1.2, 1.4, 1.7, 2.0, 2.3],  # sweep grid, 1.0 is the baseline
    "gamma": 0.95,               # discount factor
    "strict": False,             # reject w > w* when a model is available
    "seed": 0,                   # first seed
    "seeds": 1,                  # number of consecutive seeds
    "tol": 1e-10,                # value-iteration residual tolerance
    "max_iters": 100000,         # value-iteration iteration cap
    "gpi_loops": 0,              # >0 runs generalized policy iteration with n loops
    "state_cap": 1000,           # enumerate_model refuses larger state spaces
    "steps": 150000,             # deep: environment steps; tabular-ql: updates
    "H": 40.0,                   # step-size constant, alpha_t = H / (t + t0)
    "t0": 160.0,                 # step-size offset
    "tau": 1,                    # mixing constant of the finite-time bound
    "delta": 0.1,                # failure probability of the bound
    "sigma": 0.5,                # visitation lower bound of the bound
    "radius": 10.0,              # projection radius Z
    "noise_bound": 0.0,          # M~; 0 means estimate it from the model
    "T": 10000,                  # linear-fa horizon
    "horizon": 5000,             # bound-check horizon
    "batch_size": 64,
    "learning_rate": 5e-5,
    "target_period": 100,        # T of the deep algorithm
    "eval_loops": 5,             # n of the deep algorithm
    "buffer_capacity": 10000,
    "eps_start": 1.0,
    "eps_end": 0.1,
    "eps_decay": 20000.0,
    "optimizer": "adam",         # adam | sgd
    "hidden": [256, 128],
    "baseline": False,           # deep: plain minimax target, requires w = 1
    "probe_states": 32,
    "probe_every": 100,
    "max_episode_steps": 500,
    "trace": False,              # deep: also write episodes.jsonl (one line per environment step)
    "jobs": 1,                   # parallel workers for sweeps
    "out": "runs",
    "force": False,
}

SEED_ENV_VAR = "SOR_SEED"
RUNTIME_KEYS = ("force", "jobs", "out")


def get_config_dir() -> Path:
    """Get the configuration directory path."""
    # Use XDG_CONFIG_HOME if available, otherwise use ~/.sor_mql
    xdg_config_home = os.environ.get("XDG_CONFIG_HOME")
    if xdg_config_home:
        return Path(xdg_config_home) / "sor_mql"
    return Path.home() / ".sor_mql"


def get_config_file() -> Path:
    """Get the default configuration file path."""
    return get_config_dir() / "config.json"


def _coerce(key: str, value: Any) -> Any:
    default = DEFAULT_CONFIG[key]
    if isinstance(default, bool):
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in ("true", "false", "1", "0"):
            return value.lower() in ("true", "1")
        raise ConfigError(f"配置项 {key} 需要布尔值，得到 {value!r}")
    if isinstance(default, int):
        if isinstance(value, bool):
            raise ConfigError(f"配置项 {key} 需要整数，得到 {value!r}")
        if isinstance(value, int):
            return value
        try:
            number = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"配置项 {key} 需要整数，得到 {value!r}") from None
        if not number.is_integer():
            raise ConfigError(f"配置项 {key} 需要整数，得到 {value!r}")
        return int(number)
    if isinstance(default, float):
        if isinstance(value, bool):
            raise ConfigError(f"配置项 {key} 需要实数，得到 {value!r}")
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"配置项 {key} 需要实数，得到 {value!r}") from None
    if isinstance(default, list):
        if isinstance(value, str):
            value = [v for v in value.split(",") if v.strip()]
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"配置项 {key} 需要列表，得到 {value!r}")
        item_type = type(default[0]) if default else float
        try:
            return [item_type(v) for v in value]
        except (TypeError, ValueError):
            raise ConfigError(f"配置项 {key} 的元素类型错误: {value!r}") from None
    return str(value)


def merge_config(base: Mapping[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    """Overlay known keys onto base, coercing them to the default types."""
    merged = dict(base)
    for key, value in overrides.items():
        if key not in DEFAULT_CONFIG:
            raise ConfigError(f"未知的配置项: {key}")
        merged[key] = _coerce(key, value)
    return merged


def read_user_config(path: Optional[Path] = None) -> Dict[str, Any]:
    """Read the raw JSON object of a config file, without defaults.

    An explicit path must exist; without one the user config file is used
    when present, otherwise an empty dict is returned.
    """
    if path is None:
        path = get_config_file()
        if not path.exists():
            return {}
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            user_config = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"配置文件不存在: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"配置文件不是合法的 JSON: {path}: {e}") from None
    if not isinstance(user_config, dict):
        raise ConfigError(f"配置文件必须是一个扁平的 JSON 对象: {path}")
    logger.debug(f"加载配置文件 {path}")
    return user_config


def load_config(path: Optional[Path] = None) -> Dict[str, Any]:
    """Load configuration from file and merge it over the defaults."""
    config = json.loads(json.dumps(DEFAULT_CONFIG))
    return merge_config(config, read_user_config(path))


def save_config(config: Mapping[str, Any], path: Path) -> Path:
    """Save the resolved configuration next to the results."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(dict(config), f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def resolve_config(file_path: Optional[Path] = None, overrides: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
    """Defaults < config file < CLI overrides; SOR_SEED fills a missing seed."""
    user_config = read_user_config(file_path)
    config = merge_config(json.loads(json.dumps(DEFAULT_CONFIG)), user_config)
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    if "seed" not in overrides and "seed" not in user_config and os.environ.get(SEED_ENV_VAR):
        overrides["seed"] = os.environ[SEED_ENV_VAR]
        logger.debug(f"使用环境变量 {SEED_ENV_VAR}={overrides['seed']} 作为种子")
    config = merge_config(config, overrides)
    validate_config(config)
    return config


def validate_config(config: Mapping[str, Any]) -> None:
    """Reject configurations that no run could use."""
    if config["env"] not in ("guard-invader", "soccer"):
        raise ConfigError(f"不支持的环境: {config['env']}")
    if config["algorithm"] not in ("tabular-vi", "tabular-ql", "linear-fa", "deep"):
        raise ConfigError(f"不支持的算法: {config['algorithm']}")
    if config["grid"] < 2:
        raise ConfigError("grid 至少为 2")
    if not config["w_list"]:
        raise ConfigError("w_list 不能为空")
    if any(w < 1.0 for w in config["w_list"]) or config["w"] < 1.0:
        raise ConfigError("松弛参数 w 必须 >= 1")
    if config["seeds"] < 1:
        raise ConfigError("seeds 至少为 1")
    if not 0.0 < config["gamma"] < 1.0:
        raise ConfigError("gamma 必须在 (0, 1) 内")
    if config["jobs"] < 1:
        raise ConfigError("jobs 至少为 1")
    if config["baseline"] and config["w"] != 1.0:
        raise ConfigError("baseline 运行要求 w = 1")


def seed_list(config: Mapping[str, Any]):
    """Consecutive seeds starting at config['seed']."""
    return [config["seed"] + i for i in range(config["seeds"])]


def fingerprint(config: Mapping[str, Any]) -> str:
    """First 16 hex chars of the SHA-256 of the canonical JSON.

    Keys in RUNTIME_KEYS do not change results and are left out.
    """
    data = {k: v for k, v in config.items() if k not in RUNTIME_KEYS}
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

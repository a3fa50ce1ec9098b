#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
命令行参数解析模块

凡是 dest 与配置键同名的参数都默认为 None，只有显式给出时才覆盖配置文件。
"""

import argparse
from typing import Any, Dict, List, Optional

from ..config import DEFAULT_CONFIG
from ..harness import ALGORITHMS


def _common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("-d", "--debug", action="store_true", help="开启调试模式")
    parser.add_argument("--config", default=None, help="配置文件路径 (扁平 JSON)")
    parser.add_argument("--force", action="store_true", default=None, help="覆盖指纹相同的已有结果")
    parser.add_argument("--json", action="store_true", help="以 JSON 输出报告")
    return parser


def _env_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--env", default=None, choices=["guard-invader", "soccer"], help="环境")
    parser.add_argument("--grid", type=int, default=None, help="网格边长 n")
    parser.add_argument("--gamma", type=float, default=None, help="折扣因子")
    parser.add_argument("--max-episode-steps", dest="max_episode_steps", type=int, default=None, help="回合步数上限")
    parser.add_argument("--state-cap", dest="state_cap", type=int, default=None, help="模型枚举的状态数上限")
    return parser


def _sor_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--w", type=float, default=None, help="松弛参数 w (>= 1)")
    parser.add_argument("--strict", action="store_true", default=None, help="w 超过 w* 时报错")
    parser.add_argument("--tol", type=float, default=None, help="值迭代残差容差")
    parser.add_argument("--max-iters", dest="max_iters", type=int, default=None, help="值迭代次数上限")
    return parser


def _seed_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--seed", type=int, default=None, help="起始种子 (缺省时读 SOR_SEED)")
    parser.add_argument("--seeds", type=int, default=None, help="连续种子个数")
    parser.add_argument("--steps", type=int, default=None, help="步数")
    parser.add_argument("--out", default=None, help="输出目录")
    return parser


def _schedule_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--H", dest="H", type=float, default=None, help="步长常数 H")
    parser.add_argument("--t0", type=float, default=None, help="步长偏移 t0")
    return parser


def _linear_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--tau", type=int, default=None, help="误差界中的混合常数 tau")
    parser.add_argument("--delta", type=float, default=None, help="误差界的失败概率")
    parser.add_argument("--sigma", type=float, default=None, help="访问频率下界")
    parser.add_argument("--radius", type=float, default=None, help="投影半径 Z")
    parser.add_argument("--noise-bound", dest="noise_bound", type=float, default=None, help="噪声上界 M~，0 表示由模型估计")
    parser.add_argument("--T", dest="T", type=int, default=None, help="递推步数")
    return parser


def _deep_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--batch-size", dest="batch_size", type=int, default=None, help="批量大小")
    parser.add_argument("--learning-rate", dest="learning_rate", type=float, default=None, help="学习率")
    parser.add_argument("--target-period", dest="target_period", type=int, default=None, help="目标网络同步周期 T")
    parser.add_argument("--eval-loops", dest="eval_loops", type=int, default=None, help="评估网络同步倍数 n")
    parser.add_argument("--buffer-capacity", dest="buffer_capacity", type=int, default=None, help="回放容量")
    parser.add_argument("--eps-start", dest="eps_start", type=float, default=None, help="初始探索率")
    parser.add_argument("--eps-end", dest="eps_end", type=float, default=None, help="最终探索率")
    parser.add_argument("--eps-decay", dest="eps_decay", type=float, default=None, help="探索率衰减时间常数")
    parser.add_argument("--optimizer", default=None, choices=["adam", "sgd"], help="优化器")
    parser.add_argument("--hidden", default=None, help="隐藏层宽度，逗号分隔，例如 256,128")
    parser.add_argument("--probe-states", dest="probe_states", type=int, default=None, help="探针状态个数")
    parser.add_argument("--probe-every", dest="probe_every", type=int, default=None, help="探针 Q 值的重算间隔")
    parser.add_argument("--trace", action="store_true", default=None, help="另写 episodes.jsonl 回合轨迹")
    return parser


def build_parser() -> argparse.ArgumentParser:
    """构造带全部子命令的解析器"""
    common = _common_parser()
    env = _env_parser()
    sor = _sor_parser()
    seeds = _seed_parser()
    schedule = _schedule_parser()
    linear = _linear_parser()
    deep = _deep_parser()

    parser = argparse.ArgumentParser(prog="sor_mql", description="SOR 极小极大 Q 学习：求解、训练与实验")
    subparsers = parser.add_subparsers(dest="command", help="子命令")

    solve_parser = subparsers.add_parser("solve-matrix", parents=[common], help="求解矩阵博弈，输出值与策略 (JSON)")
    source = solve_parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", default=None, help="收益矩阵 CSV，行是最大化方的动作")
    source.add_argument("--matrix", default=None, help='直接给出矩阵，例如 "1,-1;-1,1"')
    solve_parser.add_argument("--tol", type=float, default=None, help="残差容差")

    vi_parser = subparsers.add_parser("tabular-vi", parents=[common, env, sor], help="SOR 值迭代，写出 Q* 与残差")
    vi_parser.add_argument("--gpi-loops", dest="gpi_loops", type=int, default=None, help="大于 0 时改用广义策略迭代，每轮 n 次评估")
    vi_parser.add_argument("--out", default=None, help="输出目录")
    subparsers.add_parser("tabular-ql", parents=[common, env, sor, seeds, schedule], help="在线 SOR Q 学习，写出误差曲线")
    subparsers.add_parser(
        "linear-fa", parents=[common, env, sor, seeds, schedule, linear], help="投影线性递推，写出 xi 曲线与误差界"
    )

    bound_parser = subparsers.add_parser("bound-check", parents=[common, schedule], help="逐项验证步长序列不等式")
    bound_parser.add_argument("--tau", type=int, default=None, help="混合常数 tau")
    bound_parser.add_argument("--horizon", type=int, default=None, help="检查到的最大 t")
    bound_parser.add_argument("--gamma-prime", dest="gamma_prime", type=float, default=0.9, help="收缩因子 gamma' (默认: 0.9)")
    bound_parser.add_argument("--exponent", type=float, default=0.999, help="第三个不等式的指数 (默认: 0.999)")

    deep_parser = subparsers.add_parser("train-deep", parents=[common, env, sor, seeds, deep], help="训练 D-SOR-MQL，每个种子一个目录")
    deep_parser.add_argument("--baseline", action="store_true", default=None, help="w = 1 的普通极小极大目标")

    sweep_parser = subparsers.add_parser(
        "sweep", parents=[common, env, sor, seeds, schedule, linear, deep], help="对 w 列表和种子做消融扫描"
    )
    sweep_parser.add_argument("--algorithm", default=None, choices=list(ALGORITHMS), help="算法")
    sweep_parser.add_argument("--w-list", dest="w_list", default=None, help="w 列表，逗号分隔")
    sweep_parser.add_argument("--jobs", type=int, default=None, help="并行进程数")
    sweep_parser.add_argument("--gpi-loops", dest="gpi_loops", type=int, default=None, help="tabular-vi 的广义策略迭代评估次数")

    plot_parser = subparsers.add_parser("plot", parents=[common], help="把若干 CSV 画成一张 SVG")
    plot_parser.add_argument("csv", nargs="+", help="输入 CSV")
    plot_parser.add_argument("--x", required=True, help="横轴字段")
    plot_parser.add_argument("--y", required=True, help="纵轴字段")
    plot_parser.add_argument("--out", dest="svg", required=True, help="输出 SVG 路径")
    plot_parser.add_argument("--labels", default=None, help="图例，逗号分隔，个数与 CSV 相同")
    plot_parser.add_argument("--title", default=None, help="标题")

    validate_parser = subparsers.add_parser("validate", parents=[common], help="运行全部性质检查")
    validate_parser.add_argument("--canary", action="store_true", help="追加一个必然失败的收缩检查")
    validate_parser.add_argument("--seed", type=int, default=None, help="随机种子")

    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """解析命令行参数"""
    return build_parser().parse_args(argv)


def config_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """取出与配置键同名且显式给出的参数"""
    return {k: v for k, v in vars(args).items() if k in DEFAULT_CONFIG and v is not None}

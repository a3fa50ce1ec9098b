#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
异常定义模块
"""


class SorError(Exception):
    """所有 sor_mql 异常的基类"""


class NonFiniteInput(SorError):
    """输入矩阵或向量包含 NaN / inf"""


class SolverFailure(SorError):
    """单纯形法超过迭代上限"""


class DimensionMismatch(SorError, ValueError):
    """维度不一致"""


class InvalidAction(SorError, ValueError):
    """动作不在环境的动作集合中"""


class SteppingTerminalState(SorError):
    """在终止状态上继续调用 step"""


class StateSpaceTooLarge(SorError):
    """状态空间超过枚举上限"""


class NoConvergence(SorError):
    """值迭代在 max_iters 内没有收敛"""

    def __init__(self, message: str, iterations: int = 0, residual: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class RadiusNonPositive(SorError, ValueError):
    """投影半径 Z 必须为正"""


class InvalidParams(SorError, ValueError):
    """界参数不满足定理前提"""


class InequalityViolated(SorError):
    """序列不等式数值检查失败"""


class MissingColumn(SorError, KeyError):
    """CSV 中缺少需要的列"""


class EmptySeries(SorError, ValueError):
    """绘图序列为空"""


class ConfigError(SorError, ValueError):
    """配置错误"""


class NumericalDivergence(SorError):
    """训练中损失变为 NaN / inf"""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class OutputExists(SorError):
    """同一指纹的输出文件已存在，需要 --force 才能覆盖"""

"""
Lorenz-63 动力学

漂移项 g(x) 与固定步长的 Dormand–Prince 五阶 Runge-Kutta 流映射。
所有函数对最后一维为3的任意形状数组向量化，可一次推进整个粒子云。
"""

import math
from functools import lru_cache

import numpy as np

from ..core.exceptions import NonFiniteState
from ..utils.constants import (
    LORENZ_BETA, LORENZ_RHO, LORENZ_SIGMA, LORENZ_SPINUP_START, LORENZ_SPINUP_TIME,
    RK_INNER_STEP
)

# Dormand–Prince 5(4) 系数（仅使用五阶解）
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)


def lorenz_drift(x: np.ndarray) -> np.ndarray:
    """Lorenz-63 向量场 g(x)"""
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    return np.stack([
        LORENZ_SIGMA * (x2 - x1),
        x1 * (LORENZ_RHO - x3) - x2,
        x1 * x2 - LORENZ_BETA * x3,
    ], axis=-1)


def substep_count(dt: float, inner_step: float = RK_INNER_STEP) -> int:
    """内部子步数 n_sub = ⌈dt / inner_step⌉"""
    return max(1, math.ceil(round(dt / inner_step, 9)))


def _dopri5_step(x: np.ndarray, h: float) -> np.ndarray:
    stages = []
    for row in _A:
        xi = x
        for a, k in zip(row, stages):
            xi = xi + h * a * k
        stages.append(lorenz_drift(xi))
    increment = sum(b * k for b, k in zip(_B, stages) if b != 0.0)
    return x + h * increment


def lorenz_flow(x: np.ndarray, dt: float, inner_step: float = RK_INNER_STEP) -> np.ndarray:
    """
    在 [0, dt] 上积分 Lorenz-63 系统

    Args:
        x: 初始状态，形状 (..., 3)
        dt: 积分时长（模型时间步 Δ）
        inner_step: 子步长上限，子步数为 ⌈dt / inner_step⌉

    Returns:
        dt 时刻的状态，形状与 x 相同

    Raises:
        NonFiniteState: 积分结果出现 NaN/Inf
    """
    if dt <= 0:
        raise ValueError(f"dt 必须为正: {dt}")
    state = np.asarray(x, dtype=float)
    n_sub = substep_count(dt, inner_step)
    h = dt / n_sub
    with np.errstate(over='ignore', invalid='ignore'):
        for _ in range(n_sub):
            state = _dopri5_step(state, h)
    if not np.all(np.isfinite(state)):
        raise NonFiniteState(f"Lorenz积分在 dt={dt} 内发散")
    return state


@lru_cache(maxsize=1)
def attractor_point() -> np.ndarray:
    """从 (8, 0, 30) 积分5个时间单位得到的吸引子上的点"""
    point = lorenz_flow(np.array(LORENZ_SPINUP_START, dtype=float), LORENZ_SPINUP_TIME)
    point.setflags(write=False)
    return point

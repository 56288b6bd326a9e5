"""
线性高斯精确基线

标量线性高斯模型的 Kalman 滤波、RTS 平滑（含滞后一阶协方差）、
联合平滑抽样以及 KS-EM 参数估计。初始分布 p(x_0) 固定，不参与估计。
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy import stats

from .exceptions import DegenerateRegressor, SingularInnovation
from .rng import RngStream
from ..models.particle_model import GaussianBelief, Trajectory
from ..models.theta import ThetaLinear, update_params
from ..utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class KalmanPass:
    """前向滤波的逐时刻矩，下标 0..T（预测矩第0项未使用）"""
    filtered_mean: np.ndarray
    filtered_var: np.ndarray
    predicted_mean: np.ndarray
    predicted_var: np.ndarray
    loglik: float


@dataclass
class SmoothedMoments:
    """RTS 平滑矩；lag_one[t] = Cov(x_t, x_{t-1} | y_{1:T})，第0项未使用"""
    mean: np.ndarray
    var: np.ndarray
    lag_one: np.ndarray
    gain: np.ndarray


def _observations(y: np.ndarray) -> np.ndarray:
    return np.asarray(y, dtype=float).reshape(-1)


def kalman_pass(theta: ThetaLinear, y: np.ndarray) -> KalmanPass:
    """前向 Kalman 递推"""
    y = _observations(y)
    T = y.size
    A, Q, R = theta.A, theta.Q, theta.R
    m_f = np.empty(T + 1)
    p_f = np.empty(T + 1)
    m_p = np.zeros(T + 1)
    p_p = np.zeros(T + 1)
    m_f[0], p_f[0] = theta.x0_mean, theta.x0_var
    for t in range(1, T + 1):
        m_p[t] = A * m_f[t - 1]
        p_p[t] = A * A * p_f[t - 1] + Q
        s = p_p[t] + R
        if not np.isfinite(s) or s <= 0:
            raise SingularInnovation(f"创新方差非正: t={t}, S={s}")
        gain = p_p[t] / s
        innovation = y[t - 1] - m_p[t]
        m_f[t] = m_p[t] + gain * innovation
        p_f[t] = (1.0 - gain) * p_p[t]
    # 创新分布 y_t | y_{1:t-1} ~ N(m_p[t], P_p[t] + R)
    loglik = float(np.sum(stats.norm.logpdf(y, loc=m_p[1:], scale=np.sqrt(p_p[1:] + R))))
    return KalmanPass(m_f, p_f, m_p, p_p, loglik)


def kalman_filter(theta: ThetaLinear, y: np.ndarray) -> Tuple[List[GaussianBelief], float]:
    """
    Kalman 滤波

    Returns:
        (滤波信念 t=0..T, 精确对数似然 log p(y_{1:T}))

    Raises:
        SingularInnovation: 创新方差 S_t ≤ 0
    """
    result = kalman_pass(theta, y)
    beliefs = [GaussianBelief(m, [[p]]) for m, p in zip(result.filtered_mean, result.filtered_var)]
    return beliefs, result.loglik


def rts_moments(theta: ThetaLinear, forward: KalmanPass) -> SmoothedMoments:
    """RTS 后向递推"""
    T = forward.filtered_mean.size - 1
    mean = forward.filtered_mean.copy()
    var = forward.filtered_var.copy()
    gain = np.zeros(T + 1)
    lag_one = np.zeros(T + 1)
    for t in range(T - 1, -1, -1):
        gain[t] = forward.filtered_var[t] * theta.A / forward.predicted_var[t + 1]
        mean[t] = forward.filtered_mean[t] + gain[t] * (mean[t + 1] - forward.predicted_mean[t + 1])
        var[t] = forward.filtered_var[t] + gain[t] ** 2 * (var[t + 1] - forward.predicted_var[t + 1])
        lag_one[t + 1] = gain[t] * var[t + 1]
    return SmoothedMoments(mean, var, lag_one, gain)


def rts_smoother(theta: ThetaLinear, y: np.ndarray) -> List[GaussianBelief]:
    """RTS 平滑信念 t=0..T"""
    moments = rts_moments(theta, kalman_pass(theta, y))
    return [GaussianBelief(m, [[p]]) for m, p in zip(moments.mean, moments.var)]


def joint_smoothing_sample(theta: ThetaLinear, y: np.ndarray, rng: RngStream) -> Trajectory:
    """
    从 p(x_{0:T} | y_{1:T}) 精确抽样

    先抽 x_T ~ N(m_T, P_T)，再依次抽 x_t | x_{t+1}, y_{1:t}。
    """
    forward = kalman_pass(theta, y)
    T = forward.filtered_mean.size - 1
    states = np.empty(T + 1)
    states[T] = forward.filtered_mean[T] + np.sqrt(forward.filtered_var[T]) * rng.normal()
    for t in range(T - 1, -1, -1):
        gain = forward.filtered_var[t] * theta.A / forward.predicted_var[t + 1]
        mean = forward.filtered_mean[t] + gain * (states[t + 1] - forward.predicted_mean[t + 1])
        variance = max(forward.filtered_var[t] - gain * theta.A * forward.filtered_var[t], 0.0)
        states[t] = mean + np.sqrt(variance) * rng.normal()
    return Trajectory(states)


def ks_em_step(theta: ThetaLinear, y: np.ndarray) -> Tuple[ThetaLinear, float]:
    """
    KS-EM 单步

    Returns:
        (更新后的参数, 更新前参数下的对数似然)
    """
    y = _observations(y)
    T = y.size
    forward = kalman_pass(theta, y)
    moments = rts_moments(theta, forward)
    second = moments.var + moments.mean ** 2
    s11 = float(np.sum(second[1:]))
    s00 = float(np.sum(second[:-1]))
    s10 = float(np.sum(moments.lag_one[1:] + moments.mean[1:] * moments.mean[:-1]))
    if s00 <= 0:
        raise DegenerateRegressor("E[x_{t-1}²] 之和为零")
    A = s10 / s00
    Q = (s11 - A * s10) / T
    R = float(np.mean((y - moments.mean[1:]) ** 2 + moments.var[1:]))
    return update_params(theta, {'A': A, 'Q': Q, 'R': R}), forward.loglik


def ks_em(theta0: ThetaLinear, y: np.ndarray, iters: int) -> Tuple[ThetaLinear, np.ndarray]:
    """
    KS-EM（Kalman 平滑 EM）

    Args:
        theta0: 初始参数（初始分布在迭代中保持不变）
        y: 观测
        iters: 迭代次数 (≥ 1)

    Returns:
        (最终参数, 各次迭代 E 步参数下的对数似然)
    """
    if iters < 1:
        raise ValueError(f"迭代次数必须 ≥ 1: {iters}")
    theta = theta0
    trace = np.empty(iters)
    for r in range(iters):
        theta, trace[r] = ks_em_step(theta, y)
    logger.debug(f"KS-EM 完成 {iters} 次迭代: A={theta.A:.6f}, Q={theta.Q:.6f}, R={theta.R:.6f}")
    return theta, trace

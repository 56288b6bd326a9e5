"""
集合卡尔曼平滑基线

随机（扰动观测）EnKS：在整个时间窗上用集合互协方差把每个观测的信息传回过去的状态，
不做局地化与膨胀。EnKS-EM 以集合成员作为平滑样本，沿用粒子方法的闭式 M 步。
"""

import time
from dataclasses import dataclass

import numpy as np
from scipy import linalg, stats

from .exceptions import SingularEnsembleCovariance
from .rng import RngStream
from ..models.ssm import StateSpaceModel
from ..models.theta import Theta
from ..models.trace_model import SemRecord, SemTrace
from ..utils.constants import DEFAULT_KEEP_LAST, ENSEMBLE_CONDITION_LIMIT
from ..utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class EnksResult:
    """平滑集合 (n_members, T+1, d_x) 与 EnKF 前向过程的创新对数似然"""
    members: np.ndarray
    loglik: float

    @property
    def mean(self) -> np.ndarray:
        return self.members.mean(axis=0)


def enks(model: StateSpaceModel, y: np.ndarray, n_members: int, rng: RngStream) -> EnksResult:
    """
    随机 EnKS

    Args:
        model: 状态空间模型
        y: 观测 (T, d_y)
        n_members: 集合成员数 (≥ 2)
        rng: 随机流

    Raises:
        SingularEnsembleCovariance: 状态异常秩不足或创新协方差病态
    """
    if n_members < 2:
        raise ValueError(f"集合成员数必须 ≥ 2: {n_members}")
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    T, d_y = y.shape
    d_x = model.d_x
    R = model.observation_cov()
    obs_chol = np.linalg.cholesky(R)

    members = np.empty((n_members, T + 1, d_x))
    members[:, 0] = model.sample_initial(rng, n_members)
    loglik = 0.0

    for t in range(1, T + 1):
        members[:, t] = model.sample_transition(rng, members[:, t - 1], t)
        forecast = members[:, t]
        anomalies = forecast - forecast.mean(axis=0)
        rank = np.linalg.matrix_rank(anomalies)
        if rank < d_x:
            raise SingularEnsembleCovariance(
                f"t={t}: 集合状态异常秩为 {rank} < {d_x}，成员数 {n_members} 不足"
            )

        predicted = model.observe_mean(forecast)
        predicted_mean = predicted.mean(axis=0)
        obs_anomalies = predicted - predicted_mean
        S = obs_anomalies.T @ obs_anomalies / (n_members - 1) + R
        if np.linalg.cond(S) > ENSEMBLE_CONDITION_LIMIT:
            raise SingularEnsembleCovariance(f"t={t}: 创新协方差条件数过大")
        loglik += float(stats.multivariate_normal.logpdf(y[t - 1], mean=predicted_mean, cov=S))

        # 在 0..t 的整段历史上更新
        history = members[:, :t + 1].reshape(n_members, -1)
        history_anomalies = history - history.mean(axis=0)
        cross = history_anomalies.T @ obs_anomalies / (n_members - 1)
        perturbed = y[t - 1] + rng.normal((n_members, d_y)) @ obs_chol.T
        innovations = perturbed - predicted
        increments = linalg.solve(S, innovations.T, assume_a='pos').T @ cross.T
        members[:, :t + 1] = (history + increments).reshape(n_members, t + 1, d_x)

    if not np.all(np.isfinite(members)):
        raise SingularEnsembleCovariance("集合更新产生非有限值")
    return EnksResult(members, loglik)


def enks_em(theta0: Theta,
            model: StateSpaceModel,
            y: np.ndarray,
            n_members: int,
            iters: int,
            rng: RngStream,
            keep_last: int = DEFAULT_KEEP_LAST,
            record_wall_time: bool = False) -> SemTrace:
    """
    EnKS-EM

    E 步为一次 EnKS，M 步把集合成员当作平滑样本代入闭式估计。
    记录的对数似然为 EnKF 前向过程的高斯创新对数似然。

    Returns:
        SemTrace（与随机EM相同的表结构）
    """
    from .estimation import maximize_theta

    theta = theta0
    trace = SemTrace(param_names=list(theta0.estimated), keep_last=keep_last, arm='enks')
    for r in range(1, iters + 1):
        started = time.perf_counter()
        current = model.with_theta(theta)
        result = enks(current, y, n_members, rng)
        theta, clamped = maximize_theta(current, result.members, y, theta)
        wall_ms = (time.perf_counter() - started) * 1000.0 if record_wall_time else 0.0
        trace.append(SemRecord(r, theta.params(), result.loglik, wall_ms, clamped), result.members)
        logger.debug(f"EnKS-EM 迭代 {r}/{iters}: {theta.params()}, loglik={result.loglik:.4f}")
    return trace

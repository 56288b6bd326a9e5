"""
粒子滤波

自举粒子滤波 (PF)、条件粒子滤波 (CPF，替换步骤) 与带祖先抽样的条件粒子滤波 (CPF-AS)。
每个时间步依次执行：重采样、预报、替换、加权。条件粒子固定在最后一个位置 N_f-1。
"""

from enum import Enum
from typing import Optional

import numpy as np

from .exceptions import AllWeightsDegenerate, ConditioningLengthMismatch
from .rng import RngStream
from .validator import Validator
from .weights import RESAMPLERS, effective_sample_size, normalize_log_weights
from ..models.particle_model import ParticleHistory, Trajectory
from ..models.ssm import StateSpaceModel
from ..models.theta import Theta
from ..utils.logger import get_logger

logger = get_logger(__name__)

_validator = Validator()


class FilterVariant(Enum):
    """滤波器类型"""
    PF = "pf"
    CPF = "cpf"
    CPF_AS = "cpf_as"

    @property
    def conditional(self) -> bool:
        return self is not FilterVariant.PF


def _check_conditioning(conditioning: Optional[Trajectory], T: int, d_x: int) -> np.ndarray:
    if conditioning is None:
        raise ConditioningLengthMismatch(T + 1, 0, "条件滤波需要条件轨迹")
    states = np.asarray(conditioning.states, dtype=float)
    if states.ndim == 1:
        states = states[:, None]
    if states.shape[0] != T + 1:
        raise ConditioningLengthMismatch(T + 1, states.shape[0])
    if states.shape[1] != d_x:
        raise ConditioningLengthMismatch(d_x, states.shape[1], f"条件轨迹维度应为 {d_x}，实际为 {states.shape[1]}")
    return states


def run_filter(model: StateSpaceModel,
               y: np.ndarray,
               variant: FilterVariant,
               n_f: int,
               rng: RngStream,
               conditioning: Optional[Trajectory] = None,
               theta: Optional[Theta] = None,
               resampling: str = 'systematic') -> ParticleHistory:
    """
    运行粒子滤波

    Args:
        model: 状态空间模型
        y: 观测 (T, d_y)
        variant: PF / CPF / CPF_AS
        n_f: 粒子数 (≥ 2)
        rng: 随机流
        conditioning: 条件轨迹（长度 T+1，第0行不使用），CPF/CPF_AS 必需
        theta: 若给出，则以该参数重建模型
        resampling: 'systematic' 或 'multinomial'

    Returns:
        ParticleHistory

    Raises:
        AllWeightsDegenerate: 某一时刻全部权重为零
        ConditioningLengthMismatch: 条件轨迹长度不为 T+1
    """
    if theta is not None:
        model = model.with_theta(theta)
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    T = y.shape[0]
    if T < 1:
        raise ValueError("观测序列长度必须 ≥ 1")
    if n_f < 2:
        raise ValueError(f"粒子数必须 ≥ 2: {n_f}")
    resample = RESAMPLERS[resampling]
    cond = _check_conditioning(conditioning, T, model.d_x) if variant.conditional else None

    d_x = model.d_x
    last = n_f - 1
    n_resampled = last if variant.conditional else n_f

    particles = np.empty((T + 1, n_f, d_x))
    forecast_means = np.zeros((T + 1, n_f, d_x))
    log_weights = np.zeros((T + 1, n_f))
    norm_weights = np.empty((T + 1, n_f))
    ancestors = np.empty((T + 1, n_f), dtype=np.int64)
    increments = np.empty(T)

    particles[0] = model.sample_initial(rng, n_f)
    norm_weights[0] = 1.0 / n_f
    ancestors[0] = np.arange(n_f)

    for t in range(1, T + 1):
        means = model.transition_mean(particles[t - 1], t)
        forecast_means[t] = means

        # 重采样与预报
        parents = np.empty(n_f, dtype=np.int64)
        parents[:n_resampled] = resample(rng, norm_weights[t - 1], n_resampled)
        particles[t, :n_resampled] = model.sample_from_mean(rng, means[parents[:n_resampled]])

        # 替换
        if variant is FilterVariant.CPF:
            parents[last] = last
            particles[t, last] = cond[t]
        elif variant is FilterVariant.CPF_AS:
            with np.errstate(divide='ignore'):
                log_back = np.log(norm_weights[t - 1]) + model.log_transition_from_mean(cond[t], means)
            try:
                back, _ = normalize_log_weights(log_back)
            except AllWeightsDegenerate as e:
                e.time_index = t
                raise
            parents[last] = rng.categorical(back)
            particles[t, last] = cond[t]
        ancestors[t] = parents

        # 加权
        logw = model.log_observation_density(y[t - 1], particles[t])
        try:
            norm, log_sum = normalize_log_weights(logw)
        except AllWeightsDegenerate as e:
            e.time_index = t
            raise
        log_weights[t] = logw
        norm_weights[t] = norm
        increments[t - 1] = log_sum - np.log(n_f)
        logger.debug(f"t={t} ESS={effective_sample_size(norm):.2f}")

    history = ParticleHistory(
        particles=particles,
        log_weights=log_weights,
        norm_weights=norm_weights,
        ancestors=ancestors,
        log_evidence_increments=increments,
        forecast_means=forecast_means,
        variant=variant.value,
        metadata={'resampling': resampling},
    )
    if __debug__:
        _validator.check_history(history)
    return history

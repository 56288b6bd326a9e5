"""
粒子平滑

由滤波历史抽取平滑轨迹：祖先追踪与后向模拟，以及可迭代的条件平滑器
CPF（祖先追踪）、CPF-AS（祖先追踪）、CPF-BS（后向模拟）与 PF-BS。
"""

from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from .exceptions import AllWeightsDegenerate
from .filtering import FilterVariant, run_filter
from .rng import RngStream
from .weights import normalize_log_weights
from ..models.particle_model import ParticleHistory, Trajectory
from ..models.ssm import StateSpaceModel
from ..models.theta import Theta
from ..utils.constants import BACKWARD_TENSOR_MAX_ENTRIES, BACKWARD_TENSOR_THRESHOLD
from ..utils.logger import get_logger

logger = get_logger(__name__)


class SmootherVariant(Enum):
    """平滑器类型"""
    CPF_TRACK = "cpf"
    CPF_AS_TRACK = "cpf_as"
    CPF_BS = "cpf_bs"
    PF_BS = "pf_bs"

    @property
    def filter_variant(self) -> FilterVariant:
        """对应的前向滤波器"""
        return {
            SmootherVariant.CPF_TRACK: FilterVariant.CPF,
            SmootherVariant.CPF_AS_TRACK: FilterVariant.CPF_AS,
            SmootherVariant.CPF_BS: FilterVariant.CPF,
            SmootherVariant.PF_BS: FilterVariant.PF,
        }[self]

    @property
    def backward(self) -> bool:
        """是否使用后向模拟"""
        return self in (SmootherVariant.CPF_BS, SmootherVariant.PF_BS)


def _draw(rng: RngStream, logw: np.ndarray, t: int) -> int:
    try:
        weights, _ = normalize_log_weights(logw)
    except AllWeightsDegenerate as e:
        e.time_index = t
        raise
    return rng.categorical(weights)


def _path(history: ParticleHistory, indices: np.ndarray) -> Trajectory:
    states = history.particles[np.arange(history.T + 1), indices]
    return Trajectory(states.copy(), source_indices=indices)


def ancestor_track(history: ParticleHistory, rng: RngStream) -> Trajectory:
    """
    祖先追踪

    J_T 按 w_T 抽取，随后 J_t = I_{t+1}^{J_{t+1}}。
    """
    T = history.T
    indices = np.empty(T + 1, dtype=np.int64)
    indices[T] = rng.categorical(history.norm_weights[T])
    for t in range(T - 1, -1, -1):
        indices[t] = history.ancestors[t + 1, indices[t + 1]]
    return _path(history, indices)


def _forecast_means(model: StateSpaceModel, history: ParticleHistory) -> np.ndarray:
    if history.forecast_means is not None:
        return history.forecast_means
    means = np.zeros_like(history.particles)
    for t in range(1, history.T + 1):
        means[t] = model.transition_mean(history.particles[t - 1], t)
    return means


def log_transition_tensor(model: StateSpaceModel, history: ParticleHistory) -> np.ndarray:
    """
    预计算对数转移张量

    返回形状 (T, N, N)，元素 [t, j, i] = log p(x_{t+1}^{(j)} | x_t^{(i)})，
    由保存的预报均值得到，不再运行动力学。
    """
    means = _forecast_means(model, history)
    T, n = history.T, history.n_particles
    tensor = np.empty((T, n, n))
    for t in range(T):
        next_states = history.particles[t + 1][:, None, :]
        tensor[t] = model.log_transition_from_mean(next_states, means[t + 1][None, :, :])
    return tensor


def backward_simulate(model: StateSpaceModel,
                      history: ParticleHistory,
                      rng: RngStream,
                      theta: Optional[Theta] = None,
                      log_tensor: Optional[np.ndarray] = None) -> Trajectory:
    """
    后向模拟

    J_T ∝ w_T；对 t < T，J_t ∝ w_t^{(i)} · p(x_{t+1}^{(J_{t+1})} | x_t^{(i)})。
    只使用粒子、权重与预报均值，不读取祖先索引。

    Raises:
        AllWeightsDegenerate: 某一时刻后向权重全部下溢
    """
    if theta is not None:
        model = model.with_theta(theta)
    T = history.T
    means = None if log_tensor is not None else _forecast_means(model, history)
    with np.errstate(divide='ignore'):
        log_w = np.log(history.norm_weights)
    indices = np.empty(T + 1, dtype=np.int64)
    indices[T] = _draw(rng, log_w[T], T)
    for t in range(T - 1, -1, -1):
        j = indices[t + 1]
        if log_tensor is not None:
            log_trans = log_tensor[t, j]
        else:
            log_trans = model.log_transition_from_mean(history.particles[t + 1, j], means[t + 1])
        indices[t] = _draw(rng, log_w[t] + log_trans, t)
    return _path(history, indices)


def smoother_step(model: StateSpaceModel,
                  y: np.ndarray,
                  variant: SmootherVariant,
                  conditioning: Optional[Trajectory],
                  n_f: int,
                  n_s: int,
                  rng: RngStream,
                  theta: Optional[Theta] = None,
                  resampling: str = 'systematic') -> Tuple[List[Trajectory], Trajectory, ParticleHistory]:
    """
    一次平滑迭代

    先运行对应的滤波器，再抽取 n_s 条轨迹（*_TRACK 用祖先追踪，*_BS 用后向模拟），
    下一条件轨迹从样本中均匀选取。PF_BS 忽略条件轨迹。

    Returns:
        (样本列表, 下一条件轨迹, 滤波历史)
    """
    if n_s < 1:
        raise ValueError(f"轨迹数必须 ≥ 1: {n_s}")
    if theta is not None:
        model = model.with_theta(theta)
    filter_variant = variant.filter_variant
    history = run_filter(
        model, y, filter_variant, n_f, rng,
        conditioning=conditioning if filter_variant.conditional else None,
        resampling=resampling,
    )

    if variant.backward:
        log_tensor = None
        # 预计算张量占用 T·N² 个浮点数，超过上限时逐条轨迹计算转移密度
        if n_s > BACKWARD_TENSOR_THRESHOLD and history.T * n_f * n_f <= BACKWARD_TENSOR_MAX_ENTRIES:
            log_tensor = log_transition_tensor(model, history)
        samples = [backward_simulate(model, history, rng, log_tensor=log_tensor) for _ in range(n_s)]
    else:
        samples = [ancestor_track(history, rng) for _ in range(n_s)]

    next_conditioning = samples[int(rng.integers(n_s))]
    logger.debug(f"{variant.value}: 抽取 {n_s} 条轨迹, log p(y)≈{history.log_evidence:.4f}")
    return samples, next_conditioning, history


def iterate_smoother(model: StateSpaceModel,
                     y: np.ndarray,
                     variant: SmootherVariant,
                     n_f: int,
                     n_s: int,
                     iters: int,
                     rng: RngStream,
                     conditioning0: Optional[Trajectory] = None) -> List[List[Trajectory]]:
    """
    固定参数下重复平滑迭代

    条件轨迹默认取全零序列；返回每次迭代的样本集合。
    """
    y = np.asarray(y, dtype=float)
    T = y.shape[0]
    conditioning = conditioning0 if conditioning0 is not None else Trajectory.zeros(T, model.d_x)
    sample_sets: List[List[Trajectory]] = []
    for r in range(1, iters + 1):
        samples, conditioning, _ = smoother_step(model, y, variant, conditioning, n_f, n_s, rng)
        sample_sets.append(samples)
        logger.debug(f"{variant.value} 平滑迭代 {r}/{iters} 完成")
    return sample_sets


def stack_samples(samples: List[Trajectory]) -> np.ndarray:
    """样本列表堆叠为 (n_s, T+1, d_x) 数组"""
    return np.stack([s.states for s in samples], axis=0)

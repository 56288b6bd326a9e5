"""
随机EM参数估计

E 步为一次条件平滑迭代（CPF-BS / CPF-AS / PF-BS），M 步为高斯族的闭式估计：
线性模型先更新 A 再更新 (Q, R)；Kitagawa 模型更新 (Q, R)；
Lorenz 模型取 Q̂、R̂ 的迹平均得到各向同性方差。
"""

import time
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import AllWeightsDegenerate, DegenerateRegressor, NonFiniteLogDensity, ValidationError
from .rng import RngStream
from .smoothing import SmootherVariant, smoother_step, stack_samples
from .validator import Validator
from ..models.particle_model import Trajectory
from ..models.ssm import StateSpaceModel, build_model
from ..models.theta import ModelFamily, Theta, theta_from_dict, update_params
from ..models.trace_model import SemRecord, SemTrace
from ..utils.constants import (
    DEFAULT_KEEP_LAST, DEFAULT_SEED, THETA0_RANGES, TRUE_THETAS, VARIANCE_FLOOR
)
from ..utils.logger import get_logger

logger = get_logger(__name__)

Samples = Union[np.ndarray, Sequence[Trajectory]]


@dataclass
class SemConfig:
    """随机EM配置"""
    smoother: SmootherVariant
    n_f: int
    n_s: int
    iters: int
    theta0: Theta
    conditioning0: Optional[Trajectory] = None
    seed: int = DEFAULT_SEED
    keep_last: int = DEFAULT_KEEP_LAST
    record_wall_time: bool = False
    resampling: str = 'systematic'


def _as_array(samples: Samples) -> np.ndarray:
    if isinstance(samples, np.ndarray):
        array = samples
    else:
        array = stack_samples(list(samples))
    if array.ndim == 2:
        array = array[None, :, :]
    return np.asarray(array, dtype=float)


def _observations(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return y[:, None] if y.ndim == 1 else y


def auxiliary_q(model: StateSpaceModel, samples: Samples, y: np.ndarray,
                theta: Optional[Theta] = None) -> float:
    """
    完全数据对数似然的蒙特卡罗平均

    (1/N_s) Σ_j [log p(x_0^j) + Σ_t log p(x_t^j | x_{t-1}^j) + Σ_t log p(y_t | x_t^j)]

    Raises:
        NonFiniteLogDensity: 某项对数密度非有限
    """
    if theta is not None:
        model = model.with_theta(theta)
    x = _as_array(samples)
    y = _observations(y)
    T = y.shape[0]
    total = model.log_initial_density(x[:, 0])
    for t in range(1, T + 1):
        total = total + model.log_transition_density(x[:, t], x[:, t - 1], t)
        total = total + model.log_observation_density(y[t - 1], x[:, t])
    if not np.all(np.isfinite(total)):
        raise NonFiniteLogDensity("辅助函数 Q 出现非有限值")
    return float(np.mean(total))


def mstep_gaussian(model: StateSpaceModel, samples: Samples, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    高斯族的闭式 M 步

    Q̂ = 平均 [x_t − m(x_{t-1})][·]'，R̂ = 平均 [y_t − h(x_t)][·]'，对 t 与样本取平均。
    """
    x = _as_array(samples)
    y = _observations(y)
    T = y.shape[0]
    state_residuals = np.concatenate(
        [x[:, t] - model.transition_mean(x[:, t - 1], t) for t in range(1, T + 1)], axis=0
    )
    obs_residuals = np.concatenate(
        [y[t - 1] - model.observe_mean(x[:, t]) for t in range(1, T + 1)], axis=0
    )
    Q_hat = state_residuals.T @ state_residuals / state_residuals.shape[0]
    R_hat = obs_residuals.T @ obs_residuals / obs_residuals.shape[0]
    return Q_hat, R_hat


def mstep_linear_A(samples: Samples, y: Optional[np.ndarray] = None) -> float:
    """
    线性模型的 A 更新 Â = Σ x_t x_{t-1} / Σ x_{t-1}²

    Raises:
        DegenerateRegressor: Σ x_{t-1}² = 0
    """
    x = _as_array(samples)[..., 0]
    current, previous = x[:, 1:], x[:, :-1]
    denominator = float(np.sum(previous ** 2))
    if denominator == 0.0:
        raise DegenerateRegressor()
    return float(np.sum(current * previous) / denominator)


def mstep_lorenz(model: StateSpaceModel, samples: Samples, y: np.ndarray) -> Tuple[float, float]:
    """迹平均更新 (Tr Q̂ / d_x, Tr R̂ / d_y)"""
    Q_hat, R_hat = mstep_gaussian(model, samples, y)
    return float(np.trace(Q_hat)) / Q_hat.shape[0], float(np.trace(R_hat)) / R_hat.shape[0]


def _clamp(values: Dict[str, float]) -> Tuple[Dict[str, float], bool]:
    clamped = False
    result = {}
    for name, value in values.items():
        if name != 'A' and value < VARIANCE_FLOOR:
            logger.warning(f"M 步估计 {name}={value:.3e} 低于下限，截断为 {VARIANCE_FLOOR}")
            value = VARIANCE_FLOOR
            clamped = True
        result[name] = value
    return result, clamped


def maximize_theta(model: StateSpaceModel, samples: Samples, y: np.ndarray,
                   theta_prev: Theta) -> Tuple[Theta, bool]:
    """
    按模型类型分派 M 步

    初始分布等非估计字段保持不变。

    Returns:
        (新参数, 是否发生方差截断)
    """
    family = theta_prev.family
    model = model.with_theta(theta_prev)
    if family is ModelFamily.LINEAR:
        A = mstep_linear_A(samples, y)
        Q_hat, R_hat = mstep_gaussian(model.with_theta(update_params(theta_prev, {'A': A})), samples, y)
        values = {'A': A, 'Q': float(Q_hat[0, 0]), 'R': float(R_hat[0, 0])}
    elif family is ModelFamily.KITAGAWA:
        Q_hat, R_hat = mstep_gaussian(model, samples, y)
        values = {'Q': float(Q_hat[0, 0]), 'R': float(R_hat[0, 0])}
    else:
        sigma_q2, sigma_r2 = mstep_lorenz(model, samples, y)
        values = {'sigma_q2': sigma_q2, 'sigma_r2': sigma_r2}
    values, clamped = _clamp(values)
    return update_params(theta_prev, values), clamped


def default_theta(family: ModelFamily) -> Theta:
    """模型的默认真实参数"""
    data = dict(TRUE_THETAS[family.value])
    data['model'] = family.value
    return theta_from_dict(data)


def sample_theta0(family: ModelFamily, rng: RngStream,
                  ranges: Optional[Dict[str, Sequence[float]]] = None,
                  base: Optional[Theta] = None) -> Theta:
    """
    从均匀区间抽取初始参数 θ̂_0

    Args:
        family: 模型类型
        rng: 随机流
        ranges: 参数区间，缺省为模型默认区间
        base: 提供非估计字段（初始分布、dt 等）的参数对象
    """
    ranges = ranges or THETA0_RANGES[family.value]
    base = base if base is not None else default_theta(family)
    draws = {}
    for name in base.estimated:
        low, high = ranges[name]
        draws[name] = float(low + (high - low) * rng.uniform())
    return update_params(base, draws)


def run_sem(model_family: ModelFamily, y: np.ndarray, cfg: SemConfig,
            rng: Optional[RngStream] = None) -> SemTrace:
    """
    随机EM

    每次迭代：以 θ̂_{r-1} 与条件轨迹 X*_{r-1} 运行一次平滑迭代（n_s 条轨迹），
    随后闭式 M 步得到 θ̂_r。条件轨迹跨迭代保留；PF_BS 忽略条件轨迹。

    Args:
        model_family: 模型类型
        y: 观测 (T, d_y)
        cfg: 随机EM配置
        rng: 随机流，缺省由 cfg.seed 创建

    Returns:
        SemTrace

    Raises:
        AllWeightsDegenerate: 附带迭代编号与部分记录 (partial_trace)
    """
    if cfg.theta0.family is not model_family:
        raise ValidationError(f"初始参数类型 {cfg.theta0.family.value} 与模型 {model_family.value} 不符")
    valid, error = Validator().validate_sem_config(cfg)
    if not valid:
        raise ValidationError(error)

    rng = rng if rng is not None else RngStream(cfg.seed)
    y = _observations(y)
    T = y.shape[0]
    theta = cfg.theta0
    model = build_model(theta)
    conditioning = cfg.conditioning0 if cfg.conditioning0 is not None else Trajectory.zeros(T, model.d_x)
    trace = SemTrace(param_names=list(theta.estimated), keep_last=cfg.keep_last, arm=cfg.smoother.value)

    for r in range(1, cfg.iters + 1):
        started = time.perf_counter()
        current = model.with_theta(theta)
        try:
            samples, conditioning, history = smoother_step(
                current, y, cfg.smoother, conditioning, cfg.n_f, cfg.n_s, rng, resampling=cfg.resampling
            )
        except AllWeightsDegenerate as e:
            e.iteration = r
            e.partial_trace = trace
            raise
        sample_array = stack_samples(samples)
        theta, clamped = maximize_theta(current, sample_array, y, theta)
        wall_ms = (time.perf_counter() - started) * 1000.0 if cfg.record_wall_time else 0.0
        trace.append(SemRecord(r, theta.params(), history.log_evidence, wall_ms, clamped), sample_array)
        logger.debug(f"SEM[{cfg.smoother.value}] 迭代 {r}/{cfg.iters}: {theta.params()}")

    logger.info(f"SEM[{cfg.smoother.value}] 完成: {trace.final_params}, "
                f"末次对数证据 {trace.logliks[-1]:.4f}")
    return trace

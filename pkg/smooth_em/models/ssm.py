"""
状态空间模型

通用状态空间模型接口与三个具体实例：线性高斯模型、Kitagawa 模型与 Lorenz-63 模型。
所有模型属于高斯族 x_t = m(x_{t-1}) + η_t, y_t = h(x_t) + ε_t，
方法对粒子云向量化：状态参数形状为 (..., d_x)，观测为 (..., d_y)。
"""

import math
from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np

from .dynamics import lorenz_flow
from .particle_model import Trajectory
from .theta import ModelFamily, Theta, ThetaKitagawa, ThetaLinear, ThetaLorenz
from ..core.exceptions import InvalidTheta
from ..core.rng import RngStream
from ..utils.constants import KITAGAWA_FREQUENCY
from ..utils.logger import get_logger

logger = get_logger(__name__)

_LOG_2PI = math.log(2.0 * math.pi)


class GaussianNoise:
    """零均值高斯噪声 N(0, cov)，缓存 Cholesky 因子"""

    def __init__(self, cov: np.ndarray):
        self.cov = np.atleast_2d(np.asarray(cov, dtype=float))
        self.dim = self.cov.shape[0]
        self.degenerate = not np.any(self.cov)
        if self.degenerate:
            self.chol = np.zeros_like(self.cov)
            self.log_norm = 0.0
        else:
            self.chol = np.linalg.cholesky(self.cov)
            log_det = 2.0 * float(np.sum(np.log(np.diag(self.chol))))
            self.log_norm = -0.5 * (self.dim * _LOG_2PI + log_det)

    def sample(self, rng: RngStream, shape: Tuple[int, ...] = ()) -> np.ndarray:
        """抽取形状为 shape + (dim,) 的噪声"""
        z = rng.normal(tuple(shape) + (self.dim,))
        return z @ self.chol.T

    def logpdf(self, residual: np.ndarray) -> np.ndarray:
        """残差的对数密度，形状为 residual.shape[:-1]"""
        residual = np.asarray(residual, dtype=float)
        if self.degenerate:
            return np.where(np.all(residual == 0.0, axis=-1), 0.0, -np.inf)
        flat = residual.reshape(-1, self.dim)
        solved = np.linalg.solve(self.chol, flat.T).T
        quad = np.sum(solved ** 2, axis=-1)
        return (self.log_norm - 0.5 * quad).reshape(residual.shape[:-1])


class StateSpaceModel(ABC):
    """高斯族状态空间模型接口"""

    family: ModelFamily

    def __init__(self, theta: Theta):
        """
        初始化模型

        Raises:
            InvalidTheta: 参数不满足不变量
        """
        valid, error = theta.validate()
        if not valid:
            raise InvalidTheta(error or "参数无效")
        self.theta = theta
        self._transition_noise = GaussianNoise(self.transition_cov())
        self._observation_noise = GaussianNoise(self.observation_cov())
        self._initial_noise = GaussianNoise(self.initial_cov())

    # ---- 结构 ----

    @property
    @abstractmethod
    def d_x(self) -> int:
        """状态维度"""

    @property
    @abstractmethod
    def d_y(self) -> int:
        """观测维度"""

    @abstractmethod
    def transition_mean(self, x_prev: np.ndarray, t: int) -> np.ndarray:
        """无噪声预报 m(x_{t-1})，t 为新状态的时间索引"""

    @abstractmethod
    def observe_mean(self, x: np.ndarray) -> np.ndarray:
        """无噪声观测算子 h(x)"""

    @abstractmethod
    def transition_cov(self) -> np.ndarray:
        """模型误差协方差 Q"""

    @abstractmethod
    def observation_cov(self) -> np.ndarray:
        """观测误差协方差 R"""

    @abstractmethod
    def initial_mean(self) -> np.ndarray:
        """p(x_0) 的均值"""

    @abstractmethod
    def initial_cov(self) -> np.ndarray:
        """p(x_0) 的协方差"""

    def with_theta(self, theta: Theta) -> 'StateSpaceModel':
        """用新参数构造同类模型"""
        return type(self)(theta)

    # ---- 抽样 ----

    def sample_initial(self, rng: RngStream, n: Optional[int] = None) -> np.ndarray:
        """从 p(x_0) 抽样；n 为 None 时返回单个状态"""
        shape = () if n is None else (n,)
        return self.initial_mean() + self._initial_noise.sample(rng, shape)

    def sample_transition(self, rng: RngStream, x_prev: np.ndarray, t: int) -> np.ndarray:
        """从 p(x_t | x_{t-1}) 抽样"""
        mean = self.transition_mean(x_prev, t)
        return mean + self._transition_noise.sample(rng, mean.shape[:-1])

    def sample_from_mean(self, rng: RngStream, mean: np.ndarray) -> np.ndarray:
        """给定预报均值加模型噪声"""
        return mean + self._transition_noise.sample(rng, mean.shape[:-1])

    def sample_observation(self, rng: RngStream, x: np.ndarray) -> np.ndarray:
        """从 p(y_t | x_t) 抽样"""
        mean = self.observe_mean(x)
        return mean + self._observation_noise.sample(rng, mean.shape[:-1])

    # ---- 密度 ----

    def log_initial_density(self, x: np.ndarray) -> np.ndarray:
        """log p(x_0)"""
        return self._initial_noise.logpdf(np.asarray(x, dtype=float) - self.initial_mean())

    def log_transition_density(self, x_next: np.ndarray, x_prev: np.ndarray, t: int) -> np.ndarray:
        """log p(x_t | x_{t-1})"""
        return self.log_transition_from_mean(x_next, self.transition_mean(x_prev, t))

    def log_transition_from_mean(self, x_next: np.ndarray, mean: np.ndarray) -> np.ndarray:
        """已知预报均值时的转移对数密度（复用预报信息，不重新运行动力学）"""
        return self._transition_noise.logpdf(np.asarray(x_next, dtype=float) - mean)

    def log_observation_density(self, y: np.ndarray, x: np.ndarray) -> np.ndarray:
        """log p(y_t | x_t)"""
        return self._observation_noise.logpdf(np.asarray(y, dtype=float) - self.observe_mean(x))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.theta})"


class LinearGaussianModel(StateSpaceModel):
    """标量线性高斯模型 x_t = A x_{t-1} + η_t, y_t = x_t + ε_t"""

    family = ModelFamily.LINEAR
    theta: ThetaLinear

    @property
    def d_x(self) -> int:
        return 1

    @property
    def d_y(self) -> int:
        return 1

    def transition_mean(self, x_prev: np.ndarray, t: int) -> np.ndarray:
        return self.theta.A * np.asarray(x_prev, dtype=float)

    def observe_mean(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float)

    def transition_cov(self) -> np.ndarray:
        return np.array([[self.theta.Q]])

    def observation_cov(self) -> np.ndarray:
        return np.array([[self.theta.R]])

    def initial_mean(self) -> np.ndarray:
        return np.array([self.theta.x0_mean])

    def initial_cov(self) -> np.ndarray:
        return np.array([[self.theta.x0_var]])


class KitagawaModel(StateSpaceModel):
    """
    Kitagawa 模型（时间非齐次）

    x_t = 0.5 x_{t-1} + 25 x_{t-1}/(1+x_{t-1}²) + 8 cos(1.2 t) + η_t
    y_t = 0.05 x_t² + ε_t
    t 从第一次转移起取 1。
    """

    family = ModelFamily.KITAGAWA
    theta: ThetaKitagawa

    @property
    def d_x(self) -> int:
        return 1

    @property
    def d_y(self) -> int:
        return 1

    def transition_mean(self, x_prev: np.ndarray, t: int) -> np.ndarray:
        x = np.asarray(x_prev, dtype=float)
        return 0.5 * x + 25.0 * x / (1.0 + x ** 2) + 8.0 * math.cos(KITAGAWA_FREQUENCY * t)

    def observe_mean(self, x: np.ndarray) -> np.ndarray:
        return 0.05 * np.asarray(x, dtype=float) ** 2

    def transition_cov(self) -> np.ndarray:
        return np.array([[self.theta.Q]])

    def observation_cov(self) -> np.ndarray:
        return np.array([[self.theta.R]])

    def initial_mean(self) -> np.ndarray:
        return np.array([self.theta.x0_mean])

    def initial_cov(self) -> np.ndarray:
        return np.array([[self.theta.x0_var]])


class LorenzModel(StateSpaceModel):
    """Lorenz-63 模型，m 为五阶 Runge-Kutta 流映射，观测部分分量"""

    family = ModelFamily.LORENZ
    theta: ThetaLorenz

    def __init__(self, theta: ThetaLorenz):
        self._observed = np.array(theta.observed, dtype=np.int64)
        super().__init__(theta)

    @property
    def d_x(self) -> int:
        return 3

    @property
    def d_y(self) -> int:
        return len(self._observed)

    def transition_mean(self, x_prev: np.ndarray, t: int) -> np.ndarray:
        return lorenz_flow(x_prev, self.theta.dt)

    def observe_mean(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float)[..., self._observed]

    def transition_cov(self) -> np.ndarray:
        return self.theta.sigma_q2 * np.eye(3)

    def observation_cov(self) -> np.ndarray:
        return self.theta.sigma_r2 * np.eye(len(self._observed))

    def initial_mean(self) -> np.ndarray:
        return np.array(self.theta.x0_mean, dtype=float)

    def initial_cov(self) -> np.ndarray:
        return self.theta.x0_var * np.eye(3)


MODEL_CLASSES = {
    ModelFamily.LINEAR: LinearGaussianModel,
    ModelFamily.KITAGAWA: KitagawaModel,
    ModelFamily.LORENZ: LorenzModel,
}


def linear_model(theta: ThetaLinear) -> LinearGaussianModel:
    """线性高斯模型"""
    return LinearGaussianModel(theta)


def kitagawa_model(theta: ThetaKitagawa) -> KitagawaModel:
    """Kitagawa 模型"""
    return KitagawaModel(theta)


def lorenz_model(theta: ThetaLorenz) -> LorenzModel:
    """Lorenz-63 模型"""
    return LorenzModel(theta)


def build_model(theta: Theta) -> StateSpaceModel:
    """根据参数类型构造模型"""
    return MODEL_CLASSES[theta.family](theta)


def simulate(model: StateSpaceModel, rng: RngStream, T: int) -> Tuple[Trajectory, np.ndarray]:
    """
    模拟真实轨迹与观测

    Args:
        model: 状态空间模型
        rng: 随机流
        T: 观测个数

    Returns:
        (真实轨迹 x_{0:T}, 观测 y_{1:T}，形状 (T, d_y))
    """
    if T < 1:
        raise ValueError(f"T 必须 ≥ 1: {T}")
    states = np.empty((T + 1, model.d_x))
    observations = np.empty((T, model.d_y))
    states[0] = model.sample_initial(rng)
    for t in range(1, T + 1):
        states[t] = model.sample_transition(rng, states[t - 1], t)
        observations[t - 1] = model.sample_observation(rng, states[t])
    logger.debug(f"模拟完成: {model.family.value}, T={T}")
    return Trajectory(states), observations

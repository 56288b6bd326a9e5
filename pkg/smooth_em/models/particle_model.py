"""
粒子数据模型

定义轨迹、粒子滤波历史记录与高斯信念的数据结构。
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..utils.constants import EIGEN_TOLERANCE, HISTORY_SUM_TOLERANCE, SYMMETRY_TOLERANCE


@dataclass
class Trajectory:
    """
    潜在状态的一条实现 x_{0:T}

    states 形状为 (T+1, d_x)，第0行为初始状态。作为条件轨迹使用时，
    第0行不被条件滤波器读取。source_indices 为 BS/祖先追踪得到的粒子索引链 J_{0:T}。
    """
    states: np.ndarray
    source_indices: Optional[np.ndarray] = None

    def __post_init__(self):
        """初始化后处理"""
        self.states = np.asarray(self.states, dtype=float)
        if self.states.ndim == 1:
            self.states = self.states[:, None]
        if self.source_indices is not None:
            self.source_indices = np.asarray(self.source_indices, dtype=np.int64)

    @classmethod
    def zeros(cls, T: int, d_x: int) -> 'Trajectory':
        """全零轨迹（SEM 的默认初始条件轨迹）"""
        return cls(np.zeros((T + 1, d_x)))

    @property
    def T(self) -> int:
        """时间步数 T"""
        return self.states.shape[0] - 1

    @property
    def d_x(self) -> int:
        """状态维度"""
        return self.states.shape[1]

    def validate(self, T: Optional[int] = None, d_x: Optional[int] = None) -> Tuple[bool, Optional[str]]:
        """验证轨迹"""
        if self.states.ndim != 2:
            return False, f"轨迹必须为二维数组，实际维数 {self.states.ndim}"
        if T is not None and self.T != T:
            return False, f"轨迹长度应为 {T + 1}，实际为 {self.T + 1}"
        if d_x is not None and self.d_x != d_x:
            return False, f"状态维度应为 {d_x}，实际为 {self.d_x}"
        if not np.all(np.isfinite(self.states)):
            return False, "轨迹包含非有限值"
        if self.source_indices is not None and self.source_indices.shape != (self.T + 1,):
            return False, "索引链长度与轨迹不一致"
        return True, None

    def __len__(self) -> int:
        return self.states.shape[0]


@dataclass
class ParticleHistory:
    """
    完整的滤波记录

    形状约定（N = N_f）:
        particles:               (T+1, N, d_x)
        log_weights:             (T+1, N)   未归一化对数权重 w̃
        norm_weights:            (T+1, N)   归一化权重 w
        ancestors:               (T+1, N)   第t行为 I_t，第0行为恒等映射（未使用）
        log_evidence_increments: (T,)       log p(y_t | y_{1:t-1}) 的估计
        forecast_means:          (T+1, N, d_x) 第t行为 m(x_{t-1}^{(i)})，第0行未使用
    """
    particles: np.ndarray
    log_weights: np.ndarray
    norm_weights: np.ndarray
    ancestors: np.ndarray
    log_evidence_increments: np.ndarray
    forecast_means: Optional[np.ndarray] = None
    variant: str = "pf"
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def T(self) -> int:
        """时间步数 T"""
        return self.particles.shape[0] - 1

    @property
    def n_particles(self) -> int:
        """粒子数 N_f"""
        return self.particles.shape[1]

    @property
    def d_x(self) -> int:
        """状态维度"""
        return self.particles.shape[2]

    @property
    def log_evidence(self) -> float:
        """log p(y_{1:T}) 的估计"""
        return float(np.sum(self.log_evidence_increments))

    def validate(self) -> Tuple[bool, Optional[str]]:
        """验证全部不变量"""
        T, n = self.T, self.n_particles
        if self.particles.ndim != 3:
            return False, "particles 必须为 (T+1, N, d_x) 数组"
        if self.log_weights.shape != (T + 1, n) or self.norm_weights.shape != (T + 1, n):
            return False, "权重数组形状与粒子不一致"
        if self.ancestors.shape != (T + 1, n):
            return False, "祖先索引数组形状与粒子不一致"
        if self.log_evidence_increments.shape != (T,):
            return False, "证据增量长度必须为 T"
        if self.forecast_means is not None and self.forecast_means.shape != self.particles.shape:
            return False, "预报均值数组形状与粒子不一致"
        if not np.all(np.isfinite(self.particles)):
            return False, "粒子包含非有限值"
        if np.any(self.norm_weights < 0):
            return False, "归一化权重存在负值"
        sums = self.norm_weights.sum(axis=1)
        worst = float(np.max(np.abs(sums - 1.0)))
        if worst > HISTORY_SUM_TOLERANCE:
            return False, f"归一化权重和偏离1: {worst:.3e}"
        if T > 0:
            parents = self.ancestors[1:]
            if parents.min() < 0 or parents.max() >= n:
                return False, "祖先索引越界"
        return True, None


@dataclass
class GaussianBelief:
    """高斯信念 N(mean, cov)"""
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        """初始化后处理"""
        self.mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        self.cov = np.atleast_2d(np.asarray(self.cov, dtype=float))

    @property
    def var(self) -> np.ndarray:
        """边缘方差"""
        return np.diag(self.cov).copy()

    def validate(self) -> Tuple[bool, Optional[str]]:
        """验证协方差对称半正定"""
        if self.cov.shape != (self.mean.size, self.mean.size):
            return False, "协方差维度与均值不一致"
        if np.max(np.abs(self.cov - self.cov.T)) > SYMMETRY_TOLERANCE:
            return False, "协方差不对称"
        if np.min(np.linalg.eigvalsh(0.5 * (self.cov + self.cov.T))) < -EIGEN_TOLERANCE:
            return False, "协方差非半正定"
        return True, None

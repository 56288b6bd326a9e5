"""
参数数据模型

定义三类状态空间模型的参数结构：线性高斯模型 (A, Q, R)、
Kitagawa 模型 (Q, R) 与 Lorenz-63 模型 (σ_Q², σ_R²)。
初始分布 p(x_0) 的均值与方差属于参数对象，但从不被估计。
"""

import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

from ..utils.constants import LORENZ_X0_VAR


class ModelFamily(Enum):
    """模型类型枚举"""
    LINEAR = "linear"
    KITAGAWA = "kitagawa"
    LORENZ = "lorenz"


@dataclass(frozen=True)
class ThetaLinear:
    """线性高斯模型参数 x_t = A x_{t-1} + η_t, y_t = x_t + ε_t"""
    A: float
    Q: float
    R: float
    x0_mean: float = 0.0
    x0_var: Optional[float] = None

    family = ModelFamily.LINEAR
    estimated = ('A', 'Q', 'R')

    def __post_init__(self):
        """缺省的初始方差取平稳方差 Q/(1-A²)；|A| ≥ 1 时退化为 Q"""
        if self.x0_var is None:
            A, Q = self.A, self.Q
            object.__setattr__(self, 'x0_var', Q / (1.0 - A * A) if abs(A) < 1.0 else Q)

    @classmethod
    def stationary(cls, A: float, Q: float, R: float, x0_mean: float = 0.0) -> 'ThetaLinear':
        """以平稳分布 N(0, Q/(1-A²)) 作为初始分布"""
        return cls(A=A, Q=Q, R=R, x0_mean=x0_mean)

    def validate(self) -> Tuple[bool, Optional[str]]:
        """验证参数"""
        if not all(math.isfinite(v) for v in (self.A, self.Q, self.R, self.x0_mean, self.x0_var)):
            return False, "参数包含非有限值"
        if self.Q <= 0 or self.R <= 0:
            return False, f"方差必须为正: Q={self.Q}, R={self.R}"
        if self.x0_var < 0:
            return False, f"初始方差不能为负: x0_var={self.x0_var}"
        return True, None

    def params(self) -> Dict[str, float]:
        """待估计参数"""
        return {'A': self.A, 'Q': self.Q, 'R': self.R}

    def to_dict(self) -> Dict[str, Any]:
        """转换为字典"""
        data = asdict(self)
        data['model'] = self.family.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ThetaLinear':
        """从字典创建实例；缺省 x0_var 时取平稳方差"""
        x0_var = data.get('x0_var')
        return cls(A=float(data['A']), Q=float(data['Q']), R=float(data['R']),
                   x0_mean=float(data.get('x0_mean', 0.0)),
                   x0_var=None if x0_var is None else float(x0_var))


@dataclass(frozen=True)
class ThetaKitagawa:
    """Kitagawa 模型参数"""
    Q: float
    R: float
    x0_mean: float = 0.0
    x0_var: float = 1.0

    family = ModelFamily.KITAGAWA
    estimated = ('Q', 'R')

    def validate(self) -> Tuple[bool, Optional[str]]:
        """验证参数"""
        if not all(math.isfinite(v) for v in (self.Q, self.R, self.x0_mean, self.x0_var)):
            return False, "参数包含非有限值"
        if self.Q <= 0 or self.R <= 0:
            return False, f"方差必须为正: Q={self.Q}, R={self.R}"
        if self.x0_var < 0:
            return False, f"初始方差不能为负: x0_var={self.x0_var}"
        return True, None

    def params(self) -> Dict[str, float]:
        """待估计参数"""
        return {'Q': self.Q, 'R': self.R}

    def to_dict(self) -> Dict[str, Any]:
        """转换为字典"""
        data = asdict(self)
        data['model'] = self.family.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ThetaKitagawa':
        """从字典创建实例"""
        return cls(
            Q=float(data['Q']),
            R=float(data['R']),
            x0_mean=float(data.get('x0_mean', 0.0)),
            x0_var=float(data.get('x0_var', 1.0))
        )


@dataclass(frozen=True)
class ThetaLorenz:
    """Lorenz-63 模型参数，Q = σ_Q² I_3，R = σ_R² I_{d_y}"""
    sigma_q2: float
    sigma_r2: float
    dt: float = 0.15
    x0_mean: Optional[Tuple[float, float, float]] = None
    x0_var: float = LORENZ_X0_VAR
    observed: Tuple[int, ...] = field(default=(0, 2))

    family = ModelFamily.LORENZ
    estimated = ('sigma_q2', 'sigma_r2')

    def __post_init__(self):
        """初始化后处理：缺省的初始均值取吸引子上的点"""
        if self.x0_mean is None:
            from .dynamics import attractor_point
            object.__setattr__(self, 'x0_mean', tuple(float(v) for v in attractor_point()))
        else:
            object.__setattr__(self, 'x0_mean', tuple(float(v) for v in self.x0_mean))
        object.__setattr__(self, 'observed', tuple(int(v) for v in self.observed))

    def validate(self) -> Tuple[bool, Optional[str]]:
        """验证参数"""
        if not all(math.isfinite(v) for v in (self.sigma_q2, self.sigma_r2, self.dt, self.x0_var)):
            return False, "参数包含非有限值"
        if self.sigma_q2 <= 0 or self.sigma_r2 <= 0:
            return False, f"方差必须为正: sigma_q2={self.sigma_q2}, sigma_r2={self.sigma_r2}"
        if self.dt <= 0:
            return False, f"模型时间步长必须为正: dt={self.dt}"
        if self.x0_var < 0:
            return False, f"初始方差不能为负: x0_var={self.x0_var}"
        if len(self.x0_mean) != 3:
            return False, "x0_mean 维度必须为3"
        if not self.observed or any(c not in (0, 1, 2) for c in self.observed) \
                or len(set(self.observed)) != len(self.observed):
            return False, f"观测分量无效: {self.observed}"
        return True, None

    def params(self) -> Dict[str, float]:
        """待估计参数"""
        return {'sigma_q2': self.sigma_q2, 'sigma_r2': self.sigma_r2}

    def to_dict(self) -> Dict[str, Any]:
        """转换为字典"""
        data = asdict(self)
        data['x0_mean'] = list(self.x0_mean)
        data['observed'] = list(self.observed)
        data['model'] = self.family.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ThetaLorenz':
        """从字典创建实例"""
        x0_mean = data.get('x0_mean')
        return cls(
            sigma_q2=float(data['sigma_q2']),
            sigma_r2=float(data['sigma_r2']),
            dt=float(data.get('dt', 0.15)),
            x0_mean=tuple(x0_mean) if x0_mean is not None else None,
            x0_var=float(data.get('x0_var', LORENZ_X0_VAR)),
            observed=tuple(data.get('observed', (0, 2)))
        )


Theta = Union[ThetaLinear, ThetaKitagawa, ThetaLorenz]

THETA_CLASSES = {
    ModelFamily.LINEAR: ThetaLinear,
    ModelFamily.KITAGAWA: ThetaKitagawa,
    ModelFamily.LORENZ: ThetaLorenz,
}


def theta_from_dict(data: Dict[str, Any]) -> Theta:
    """根据 model 字段分派创建参数对象"""
    family = ModelFamily(data['model'])
    return THETA_CLASSES[family].from_dict(data)


def update_params(theta: Theta, values: Dict[str, float]) -> Theta:
    """替换待估计参数，保持初始分布等其余设置不变"""
    unknown = [k for k in values if k not in theta.estimated]
    if unknown:
        raise KeyError(f"未知参数: {unknown}")
    return replace(theta, **{k: float(v) for k, v in values.items()})


def param_names(family: ModelFamily) -> List[str]:
    """模型待估计参数名列表"""
    return list(THETA_CLASSES[family].estimated)

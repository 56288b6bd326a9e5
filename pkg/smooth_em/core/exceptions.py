"""
自定义异常模块

定义了平滑与参数估计过程中使用的各种异常类。
"""

from typing import Any, Optional


class SmoothEMException(Exception):
    """SmoothEM 基础异常类"""
    def __init__(self, message="SmoothEM 运行失败"):
        self.message = message
        super().__init__(self.message)


# ---- 输入验证 ----

class ValidationError(SmoothEMException):
    """数据验证异常"""
    def __init__(self, message="数据验证失败"):
        super().__init__(message)


class InvalidWeights(ValidationError):
    """权重向量无效（存在负值或未归一化）"""
    def __init__(self, message="权重向量无效：存在负值或未归一化"):
        super().__init__(message)


class InvalidTheta(ValidationError):
    """参数值无效"""
    def __init__(self, message="参数值无效：方差必须为正"):
        super().__init__(message)


class InvalidHistory(ValidationError):
    """粒子历史记录不满足不变量"""
    def __init__(self, message="粒子历史记录无效"):
        super().__init__(message)


class ConditioningLengthMismatch(ValidationError):
    """条件轨迹长度与观测长度不匹配"""
    def __init__(self, expected: int, actual: int, message=None):
        self.expected = expected
        self.actual = actual
        super().__init__(message or f"条件轨迹长度应为 {expected}，实际为 {actual}")


class LengthMismatch(ValidationError):
    """样本或真值长度不一致"""
    def __init__(self, message="轨迹长度不一致"):
        super().__init__(message)


class EmptyInput(ValidationError):
    """输入为空"""
    def __init__(self, message="输入不能为空"):
        super().__init__(message)


# ---- 配置 ----

class ConfigError(SmoothEMException):
    """配置异常"""
    def __init__(self, message="配置错误"):
        super().__init__(message)


class InvalidConfig(ConfigError):
    """无效的实验配置"""
    def __init__(self, message="无效的实验配置"):
        super().__init__(message)


# ---- 数值失败 ----

class NumericalError(SmoothEMException):
    """数值计算失败"""
    def __init__(self, message="数值计算失败"):
        super().__init__(message)


class AllWeightsDegenerate(NumericalError):
    """全部粒子权重退化（全部为 -Inf 或 NaN）"""
    def __init__(self, message="全部粒子权重退化", time_index: Optional[int] = None,
                 iteration: Optional[int] = None):
        self.time_index = time_index
        self.iteration = iteration
        self.partial_trace: Any = None
        super().__init__(message)

    def __str__(self) -> str:
        parts = [self.message]
        if self.time_index is not None:
            parts.append(f"t={self.time_index}")
        if self.iteration is not None:
            parts.append(f"迭代={self.iteration}")
        return " | ".join(parts)


class NonFiniteState(NumericalError):
    """状态出现 NaN/Inf"""
    def __init__(self, message="状态积分出现非有限值"):
        super().__init__(message)


class NonFiniteLogDensity(NumericalError):
    """对数密度出现非有限值"""
    def __init__(self, message="对数密度出现非有限值"):
        super().__init__(message)


class SingularInnovation(NumericalError):
    """卡尔曼创新方差非正"""
    def __init__(self, message="创新协方差奇异或非正定"):
        super().__init__(message)


class SingularEnsembleCovariance(NumericalError):
    """集合协方差奇异"""
    def __init__(self, message="集合协方差奇异，请增加集合成员数"):
        super().__init__(message)


class DegenerateRegressor(NumericalError):
    """回归量平方和为零，无法估计A"""
    def __init__(self, message="回归量平方和为零，无法估计自回归系数"):
        super().__init__(message)

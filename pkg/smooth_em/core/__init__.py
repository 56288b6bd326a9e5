"""
核心算法模块

包含随机流、权重工具、粒子滤波与平滑、线性高斯与集合基线、随机EM及评分。
子模块按需导入，避免与 models 包的循环依赖。
"""

from .exceptions import *
from .rng import RngStream

__all__ = [
    'RngStream'
]

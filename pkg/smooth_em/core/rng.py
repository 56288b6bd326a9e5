"""
随机数流

基于 numpy SeedSequence 的可拆分随机流。相同种子与相同调用序列产生相同结果；
子流由 (场景, 重复编号, 算法) 等键派生，彼此独立且可复现。
"""

from typing import Any, Optional, Tuple, Union

import numpy as np

from ..utils.helpers import stable_key


class RngStream:
    """可拆分的种子随机流"""

    def __init__(self, seed: int = 0, keys: Tuple[int, ...] = ()):
        """
        初始化随机流

        Args:
            seed: 根种子（非负整数）
            keys: 派生键路径
        """
        self.seed = int(seed)
        self.keys = tuple(int(k) for k in keys)
        self._sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.keys)
        self._generator = np.random.Generator(np.random.PCG64(self._sequence))

    def split(self, *keys: Any) -> 'RngStream':
        """按键派生独立子流；字符串键经MD5映射为整数"""
        return RngStream(self.seed, self.keys + tuple(stable_key(k) for k in keys))

    @property
    def generator(self) -> np.random.Generator:
        """底层 numpy 生成器"""
        return self._generator

    def uniform(self, size: Optional[Union[int, Tuple[int, ...]]] = None) -> Union[float, np.ndarray]:
        """U(0,1) 随机数"""
        return self._generator.random(size)

    def normal(self, size: Optional[Union[int, Tuple[int, ...]]] = None) -> Union[float, np.ndarray]:
        """标准正态随机数"""
        return self._generator.standard_normal(size)

    def categorical(self, weights: np.ndarray) -> int:
        """按归一化权重抽取一个索引（调用方负责验证权重）"""
        cumulative = np.cumsum(weights)
        u = self._generator.random() * cumulative[-1]
        index = int(np.searchsorted(cumulative, u, side='right'))
        return min(index, int(np.flatnonzero(np.asarray(weights) > 0)[-1]))

    def integers(self, high: int, size: Optional[int] = None) -> Union[int, np.ndarray]:
        """{0, ..., high-1} 上的均匀整数"""
        return self._generator.integers(0, high, size=size)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, keys={self.keys})"

"""
权重工具

对数域归一化、单次分类抽样与重采样（系统重采样、多项式重采样）。
"""

from typing import Tuple

import numpy as np
from scipy.special import logsumexp

from .exceptions import AllWeightsDegenerate, EmptyInput, InvalidWeights
from .rng import RngStream
from ..utils.constants import WEIGHT_SUM_TOLERANCE


def normalize_log_weights(logw: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    归一化对数权重

    Args:
        logw: 未归一化对数权重

    Returns:
        (归一化权重, log Σ exp(logw))

    Raises:
        EmptyInput: 输入为空
        AllWeightsDegenerate: 所有分量均为 -Inf 或 NaN
    """
    logw = np.asarray(logw, dtype=float)
    if logw.size == 0:
        raise EmptyInput("对数权重向量为空")
    # NaN 视为零权重
    logw = np.where(np.isnan(logw), -np.inf, logw)
    if not np.any(np.isfinite(logw)):
        raise AllWeightsDegenerate("全部粒子对数权重为 -Inf/NaN")
    log_sum = float(logsumexp(logw))
    norm = np.exp(logw - log_sum)
    norm /= norm.sum()
    return norm, log_sum


def check_weights(weights: np.ndarray) -> np.ndarray:
    """验证权重非负且和为1，返回浮点数组"""
    weights = np.asarray(weights, dtype=float)
    if weights.size == 0:
        raise EmptyInput("权重向量为空")
    if not np.all(np.isfinite(weights)) or np.any(weights < 0):
        raise InvalidWeights("权重存在负值或非有限值")
    total = weights.sum()
    if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
        raise InvalidWeights(f"权重和为 {total:.12g}，未归一化")
    return weights


def categorical_draw(rng: RngStream, weights: np.ndarray) -> int:
    """按归一化权重抽取一个索引"""
    return rng.categorical(check_weights(weights))


def _inverse_cdf(weights: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """按累积权重查找位置所在索引；结果不超过最后一个正权重索引"""
    last = int(np.flatnonzero(weights > 0)[-1])
    cumulative = np.cumsum(weights)
    cumulative[last:] = 1.0
    indices = np.searchsorted(cumulative, positions, side='right')
    return np.minimum(indices, last).astype(np.int64)


def systematic_resample(rng: RngStream, weights: np.ndarray, n: int) -> np.ndarray:
    """
    系统重采样

    使用单个均匀偏移 u ~ U(0,1)，位置 (k + u)/n，k = 0..n-1。
    每个索引 i 的副本数为 ⌊n·w_i⌋ 或 ⌈n·w_i⌉。
    """
    weights = check_weights(weights)
    positions = (np.arange(n) + rng.uniform()) / n
    return _inverse_cdf(weights, positions)


def multinomial_resample(rng: RngStream, weights: np.ndarray, n: int) -> np.ndarray:
    """多项式重采样（n 次独立分类抽样）"""
    weights = check_weights(weights)
    return _inverse_cdf(weights, rng.uniform(n))


RESAMPLERS = {
    'systematic': systematic_resample,
    'multinomial': multinomial_resample,
}


def effective_sample_size(weights: np.ndarray) -> float:
    """有效样本量 1 / Σ w²"""
    weights = np.asarray(weights, dtype=float)
    return float(1.0 / np.sum(weights ** 2))

"""
评分与汇总

平滑重构的 RMSE 与覆盖率、经验分位数、退化诊断与小提琴图分位数表。
"""

from typing import List, Sequence, Union

import numpy as np
import pandas as pd

from .exceptions import EmptyInput, LengthMismatch
from ..models.particle_model import Trajectory
from ..models.trace_model import ReconstructionSummary, SemTrace
from ..utils.constants import CREDIBLE_LEVEL, CSV_HEADERS, VIOLIN_EVERY, VIOLIN_PROBS

SampleSet = Union[np.ndarray, Sequence[Trajectory]]


def _sample_array(samples: SampleSet) -> np.ndarray:
    if isinstance(samples, np.ndarray):
        array = np.asarray(samples, dtype=float)
    else:
        if not samples:
            raise EmptyInput("样本集合为空")
        lengths = {len(s.states) for s in samples}
        if len(lengths) > 1:
            raise LengthMismatch(f"样本轨迹长度不一致: {sorted(lengths)}")
        array = np.stack([s.states for s in samples], axis=0)
    if array.ndim == 2:
        array = array[:, :, None]
    return array


def quantile_summary(values: Sequence[float], probs: Union[float, Sequence[float]]) -> np.ndarray:
    """经验分位数（次序统计量之间线性插值）"""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise EmptyInput("分位数输入为空")
    return np.atleast_1d(np.quantile(values, probs))


def summarize_reconstruction(samples: SampleSet,
                             truth: Union[Trajectory, np.ndarray],
                             skip_initial: bool = True,
                             level: float = CREDIBLE_LEVEL) -> ReconstructionSummary:
    """
    平滑样本的重构摘要

    均值为逐格平均，区间为经验 (1-level)/2 与 (1+level)/2 分位数；
    RMSE 为均值相对真实值的均方根误差，CP 为真实值落在区间内的时刻比例。
    skip_initial 为真时只对 t = 1..T 评分。

    Raises:
        LengthMismatch: 样本与真实轨迹长度不一致
    """
    x = _sample_array(samples)
    if x.shape[0] < 2:
        raise EmptyInput("重构摘要至少需要2条样本")
    truth_states = truth.states if isinstance(truth, Trajectory) else np.asarray(truth, dtype=float)
    if truth_states.ndim == 1:
        truth_states = truth_states[:, None]
    if truth_states.shape != x.shape[1:]:
        raise LengthMismatch(f"样本形状 {x.shape[1:]} 与真实轨迹 {truth_states.shape} 不一致")

    start = 1 if skip_initial else 0
    x = x[:, start:]
    truth_states = truth_states[start:]
    tail = (1.0 - level) / 2.0
    mean = x.mean(axis=0)
    lo, hi = np.quantile(x, [tail, 1.0 - tail], axis=0)
    rmse = np.sqrt(np.mean((mean - truth_states) ** 2, axis=0))
    cp = np.mean((truth_states >= lo) & (truth_states <= hi), axis=0)
    return ReconstructionSummary(
        times=np.arange(start, start + mean.shape[0]),
        mean=mean, lo=lo, hi=hi, truth=truth_states, rmse=rmse, cp=cp,
    )


def distinct_states(samples: SampleSet, t: int) -> int:
    """时刻 t 上样本中互不相同的状态个数"""
    x = _sample_array(samples)
    return int(np.unique(x[:, t], axis=0).shape[0])


def degeneracy_profile(samples: SampleSet) -> np.ndarray:
    """每个时刻的互异状态个数"""
    x = _sample_array(samples)
    return np.array([np.unique(x[:, t], axis=0).shape[0] for t in range(x.shape[1])])


def _record_value(record, name: str) -> float:
    return record.loglik if name == 'loglik' else record.params[name]


def violin_summary(traces: Sequence[SemTrace], param: str,
                   every: int = VIOLIN_EVERY,
                   probs: Sequence[float] = VIOLIN_PROBS) -> pd.DataFrame:
    """
    跨重复的参数估计分位数表

    对第1次及每 every 次迭代，按 arm 汇总各重复的估计值；param 可取 'loglik'。
    """
    if not traces:
        raise EmptyInput("没有可汇总的估计记录")
    columns = CSV_HEADERS['VIOLIN']
    rows: List[list] = []
    arms = sorted({trace.arm for trace in traces})
    for arm in arms:
        group = [trace for trace in traces if trace.arm == arm]
        n_iters = min(len(trace) for trace in group)
        checkpoints = sorted({1} | set(range(every, n_iters + 1, every)))
        for r in checkpoints:
            values = [_record_value(trace.records[r - 1], param) for trace in group]
            rows.append([arm, param, r] + list(quantile_summary(values, probs)))
    return pd.DataFrame(rows, columns=columns)

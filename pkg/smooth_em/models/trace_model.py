"""
估计轨迹与重构摘要数据模型

SemTrace 记录每次迭代的参数估计与对数似然；ReconstructionSummary 保存
平滑样本相对真实轨迹的均值、95%区间与评分。
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..utils.constants import CSV_HEADERS


@dataclass
class SemRecord:
    """单次迭代的记录"""
    iteration: int
    params: Dict[str, float]
    loglik: float
    wall_ms: float = 0.0
    clamped: bool = False


@dataclass
class SemTrace:
    """
    随机EM（或EnKS-EM）的迭代记录

    samples_tail 保存最后 keep_last 次迭代的样本集合，每项形状为 (n_s, T+1, d_x)。
    """
    param_names: List[str]
    records: List[SemRecord] = field(default_factory=list)
    keep_last: int = 10
    samples_tail: List[np.ndarray] = field(default_factory=list)
    arm: str = ""

    def append(self, record: SemRecord, samples: Optional[np.ndarray] = None):
        """追加一次迭代；样本只保留最近 keep_last 组"""
        self.records.append(record)
        if samples is not None and self.keep_last > 0:
            self.samples_tail.append(samples)
            if len(self.samples_tail) > self.keep_last:
                del self.samples_tail[0]

    def __len__(self) -> int:
        return len(self.records)

    @property
    def final_params(self) -> Dict[str, float]:
        """最后一次迭代的估计"""
        if not self.records:
            return {}
        return dict(self.records[-1].params)

    @property
    def logliks(self) -> np.ndarray:
        return np.array([r.loglik for r in self.records])

    def pooled_samples(self) -> np.ndarray:
        """合并保留的样本，形状 (k·n_s, T+1, d_x)"""
        if not self.samples_tail:
            raise ValueError("没有保留的平滑样本")
        return np.concatenate(self.samples_tail, axis=0)

    def to_frame(self) -> pd.DataFrame:
        """CSV 表：iter, 参数..., loglik, wall_ms"""
        rows = []
        for record in self.records:
            row: Dict[str, Any] = {'iter': record.iteration}
            for name in self.param_names:
                row[name] = record.params[name]
            row['loglik'] = record.loglik
            row['wall_ms'] = record.wall_ms
            rows.append(row)
        columns = ['iter'] + list(self.param_names) + ['loglik', 'wall_ms']
        return pd.DataFrame(rows, columns=columns)


@dataclass
class ReconstructionSummary:
    """
    平滑重构摘要

    mean/lo/hi/truth 形状为 (n_t, d_x)，times 为对应时间索引；
    rmse 与 cp 为每个分量的评分。
    """
    times: np.ndarray
    mean: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    truth: np.ndarray
    rmse: np.ndarray
    cp: np.ndarray

    def validate(self) -> Tuple[bool, Optional[str]]:
        """区间下界不超过上界且覆盖率在 [0, 1] 内"""
        if np.any(self.lo > self.hi):
            return False, "区间下界大于上界"
        if np.any(self.cp < 0) or np.any(self.cp > 1):
            return False, "覆盖率超出 [0, 1]"
        return True, None

    def to_frame(self) -> pd.DataFrame:
        """长格式表 t, component, mean, lo, hi, truth"""
        n_t, d_x = self.mean.shape
        return pd.DataFrame({
            't': np.repeat(self.times, d_x),
            'component': np.tile(np.arange(d_x), n_t),
            'mean': self.mean.ravel(),
            'lo': self.lo.ravel(),
            'hi': self.hi.ravel(),
            'truth': self.truth.ravel(),
        }, columns=CSV_HEADERS['RECONSTRUCTION'])

    def scores_frame(self, arm: str = "") -> pd.DataFrame:
        """每个分量的 RMSE 与 CP"""
        return pd.DataFrame({
            'arm': arm,
            'component': np.arange(len(self.rmse)),
            'rmse': self.rmse,
            'cp': self.cp,
        }, columns=CSV_HEADERS['SCORES'])

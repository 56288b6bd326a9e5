"""
CSV 读写

所有结果表经 pandas 写出，使用固定的浮点格式与换行符，保证相同配置与种子得到逐字节相同的文件。
"""

import os
from typing import Optional

import numpy as np
import pandas as pd

from ..utils.constants import CSV_FLOAT_FORMAT, CSV_HEADERS
from ..utils.helpers import ensure_directory


def write_frame(frame: pd.DataFrame, file_path: str) -> str:
    """写出表格并返回路径"""
    directory = os.path.dirname(os.path.abspath(file_path))
    ensure_directory(directory)
    frame.to_csv(file_path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    return file_path


def long_frame(values: np.ndarray, start: int = 0) -> pd.DataFrame:
    """(n_t, d) 数组转为 t, component, value 长表，t 从 start 开始"""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    n_t, d = values.shape
    return pd.DataFrame({
        't': np.repeat(np.arange(start, start + n_t), d),
        'component': np.tile(np.arange(d), n_t),
        'value': values.ravel(),
    }, columns=CSV_HEADERS['TRUTH'])


def read_long_frame(file_path: str, n_components: Optional[int] = None) -> np.ndarray:
    """读取 t, component, value 长表，返回 (n_t, d) 数组"""
    frame = pd.read_csv(file_path)
    table = frame.pivot(index='t', columns='component', values='value').sort_index()
    values = table.to_numpy(dtype=float)
    if n_components is not None and values.shape[1] != n_components:
        raise ValueError(f"{file_path}: 分量数应为 {n_components}，实际为 {values.shape[1]}")
    return values


def write_truth(states: np.ndarray, file_path: str) -> str:
    """真实轨迹 t = 0..T"""
    return write_frame(long_frame(states, start=0), file_path)


def write_observations(y: np.ndarray, file_path: str) -> str:
    """观测 t = 1..T"""
    return write_frame(long_frame(y, start=1), file_path)

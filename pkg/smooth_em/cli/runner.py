"""
重复实验执行器

构造数据集与重复任务，按 --jobs 把任务分发到进程池，按重复编号确定性地合并结果。
"""

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import psutil

from ..core.enks import enks_em
from ..core.estimation import SemConfig, run_sem
from ..core.exceptions import InvalidConfig, NumericalError, SmoothEMException
from ..core.rng import RngStream
from ..core.smoothing import SmootherVariant
from ..models.particle_model import Trajectory
from ..models.ssm import build_model, simulate
from ..models.theta import ModelFamily, Theta, theta_from_dict
from ..models.trace_model import SemTrace
from ..utils.constants import ALGORITHMS
from ..utils.helpers import config_fingerprint, format_count, format_duration
from ..utils.logger import get_logger

logger = get_logger(__name__)

# 算法分组中可以覆盖的模型字段（影响模拟数据）
DATA_OVERRIDE_KEYS = ('dt',)


@dataclass
class Dataset:
    """一组模拟数据"""
    key: str
    theta: Theta
    truth: Trajectory
    y: np.ndarray


@dataclass
class RepetitionTask:
    """一次重复实验的全部输入（可被 pickle 传给子进程）"""
    scenario: str
    arm: Dict[str, Any]
    repetition: int
    seed: int
    theta0: Theta
    y: np.ndarray
    iters: int
    keep_last: int
    record_wall_time: bool


@dataclass
class RepetitionResult:
    """一次重复实验的输出"""
    arm: str
    repetition: int
    trace: Optional[SemTrace]
    elapsed: float
    rss_bytes: int
    error: Optional[str] = None
    numerical: bool = False


def default_jobs() -> int:
    """默认并行进程数：物理核心数"""
    return psutil.cpu_count(logical=False) or 1


def data_overrides(arm: Dict[str, Any]) -> Dict[str, Any]:
    """算法分组中影响数据的模型字段"""
    return {k: arm[k] for k in DATA_OVERRIDE_KEYS if k in arm}


def build_theta(config: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None) -> Theta:
    """由合并后的配置（及覆盖项）构造参数对象"""
    data = dict(config)
    data.update(overrides or {})
    try:
        theta = theta_from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidConfig(f"模型参数配置无效: {e}")
    valid, error = theta.validate()
    if not valid:
        raise InvalidConfig(error)
    return theta


def make_dataset(config: Dict[str, Any], root: RngStream, overrides: Optional[Dict[str, Any]] = None,
                 T: Optional[int] = None, tag: str = 'train') -> Dataset:
    """
    模拟一组数据

    随机流由 (data, tag, 覆盖项指纹) 派生，与算法分组的顺序无关。
    """
    overrides = overrides or {}
    theta = build_theta(config, overrides)
    T = int(T if T is not None else config['T'])
    key = config_fingerprint(overrides)
    truth, y = simulate(build_model(theta), root.split('data', tag, key), T)
    logger.debug(f"数据集 {tag}/{key}: T={T}, θ={theta.params()}")
    return Dataset(key, theta, truth, y)


def run_repetition(task: RepetitionTask) -> RepetitionResult:
    """在当前进程中运行一次重复实验"""
    name = task.arm['name']
    algorithm = task.arm['algorithm']
    rng = RngStream(task.seed).split(task.scenario, task.repetition, name)
    started = time.perf_counter()
    trace: Optional[SemTrace] = None
    error: Optional[str] = None
    numerical = False
    try:
        if algorithm == ALGORITHMS['ENKS']:
            trace = enks_em(task.theta0, build_model(task.theta0), task.y, int(task.arm['n_f']),
                            task.iters, rng, keep_last=task.keep_last,
                            record_wall_time=task.record_wall_time)
        else:
            cfg = SemConfig(
                smoother=SmootherVariant(algorithm),
                n_f=int(task.arm['n_f']),
                n_s=int(task.arm['n_s']),
                iters=task.iters,
                theta0=task.theta0,
                seed=task.seed,
                keep_last=task.keep_last,
                record_wall_time=task.record_wall_time,
            )
            trace = run_sem(task.theta0.family, task.y, cfg, rng)
        trace.arm = name
    except SmoothEMException as e:
        error = f"{type(e).__name__}: {e}"
        numerical = isinstance(e, NumericalError)
    elapsed = time.perf_counter() - started
    rss = psutil.Process(os.getpid()).memory_info().rss
    return RepetitionResult(name, task.repetition, trace, elapsed, rss, error, numerical)


def run_repetitions(tasks: List[RepetitionTask], jobs: int = 1) -> List[RepetitionResult]:
    """
    执行全部任务

    jobs > 1 时使用进程池；结果顺序与任务顺序一致。
    """
    if jobs <= 1 or len(tasks) <= 1:
        return [run_repetition(task) for task in tasks]
    logger.info(f"使用 {jobs} 个进程执行 {len(tasks)} 个任务")
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(run_repetition, tasks))


def raise_failures(results: List[RepetitionResult]) -> None:
    """把子任务中的失败转换为异常（按重复编号报告第一个失败）"""
    for result in results:
        if result.error is None:
            continue
        message = f"{result.arm} 第 {result.repetition} 次重复失败: {result.error}"
        if result.numerical:
            raise NumericalError(message)
        raise SmoothEMException(message)


def estimate_cost(config: Dict[str, Any], command: str) -> int:
    """
    估算模型演化次数 reps × arms × iters × T × n_f

    smooth 只运行一次；crossval 额外计入测试序列上的平滑迭代。
    """
    arms = config['arms']
    T = int(config['T'])
    iters = int(config['iters'])
    reps = 1 if command == 'smooth' else int(config['repetitions'])
    if command == 'simulate':
        return T
    total = sum(reps * iters * T * int(arm['n_f']) for arm in arms)
    if command == 'crossval':
        eval_iters = max(config['eval_iters'])
        total += sum(eval_iters * int(config['test_T']) * int(arm['n_f']) for arm in arms)
    return total


def check_budget(config: Dict[str, Any], command: str) -> int:
    """
    打印并检查计算量

    Raises:
        InvalidConfig: 超过 max_evals
    """
    cost = estimate_cost(config, command)
    message = f"预计模型演化次数: {format_count(cost)} ({cost})"
    print(message)
    logger.info(message)
    max_evals = config.get('max_evals')
    if max_evals is not None and cost > int(max_evals):
        raise InvalidConfig(f"计算量 {cost} 超过 --max-evals={max_evals}")
    return cost


def log_performance(perf_logger, results: List[RepetitionResult]) -> Tuple[float, int]:
    """把每次重复的耗时与内存写入性能日志，返回 (总耗时, 峰值 RSS)"""
    total = 0.0
    peak = 0
    for result in results:
        total += result.elapsed
        peak = max(peak, result.rss_bytes)
        perf_logger.info(
            f"{result.arm}#{result.repetition} 耗时 {format_duration(result.elapsed)} "
            f"RSS {result.rss_bytes / 1024 ** 2:.1f} MB"
        )
    return total, peak


def family_of(config: Dict[str, Any]) -> ModelFamily:
    """配置中的模型类型"""
    return ModelFamily(config['model'])

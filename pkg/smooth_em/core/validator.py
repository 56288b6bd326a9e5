"""
数据验证器

提供粒子历史、参数、随机EM配置与实验配置的验证功能。
"""

from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .exceptions import InvalidHistory
from ..models.particle_model import ParticleHistory
from ..models.theta import THETA_CLASSES, ModelFamily
from ..utils.constants import ALGORITHMS, MODEL_TYPES
from ..utils.logger import get_logger

logger = get_logger(__name__)

LONG_RUN_REPETITIONS = 50


def _is_int(value: Any) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


class Validator:
    """数据验证器"""

    def __init__(self):
        """初始化验证器"""
        self.model_types = set(MODEL_TYPES.values())
        self.algorithms = set(ALGORITHMS.values())

    def validate_history(self, history: ParticleHistory) -> Tuple[bool, Optional[str]]:
        """验证粒子历史记录的全部不变量"""
        if not isinstance(history, ParticleHistory):
            return False, f"期望 ParticleHistory，实际为 {type(history).__name__}"
        return history.validate()

    def check_history(self, history: ParticleHistory) -> ParticleHistory:
        """验证失败时抛出 InvalidHistory"""
        valid, error = self.validate_history(history)
        if not valid:
            raise InvalidHistory(error)
        return history

    def validate_theta(self, theta: Any) -> Tuple[bool, Optional[str]]:
        """验证参数对象"""
        if not isinstance(theta, tuple(THETA_CLASSES.values())):
            return False, f"未知的参数类型: {type(theta).__name__}"
        return theta.validate()

    def validate_sem_config(self, cfg: Any) -> Tuple[bool, Optional[str]]:
        """验证随机EM配置"""
        if cfg.iters < 1:
            return False, f"迭代次数必须 ≥ 1: {cfg.iters}"
        if cfg.n_f < 2:
            return False, f"粒子数必须 ≥ 2: {cfg.n_f}"
        if cfg.n_s < 1:
            return False, f"轨迹数必须 ≥ 1: {cfg.n_s}"
        valid, error = self.validate_theta(cfg.theta0)
        if not valid:
            return False, f"初始参数无效: {error}"
        if cfg.conditioning0 is not None:
            states = np.asarray(cfg.conditioning0.states)
            if not np.all(np.isfinite(states)):
                return False, "初始条件轨迹包含非有限值"
        return True, None

    def validate_experiment_config(self, config: Dict[str, Any]) -> Tuple[bool, List[str], List[str]]:
        """
        验证实验配置

        Returns:
            (是否有效, 错误列表, 警告列表)
        """
        errors: List[str] = []
        warnings: List[str] = []

        model = config.get('model')
        if model not in self.model_types:
            errors.append(f"未知模型: {model}")
        elif model == ModelFamily.LORENZ.value:
            if config.get('dt') is not None and float(config['dt']) <= 0:
                errors.append(f"dt 必须为正: {config['dt']}")

        algorithms = config.get('algorithms') or []
        for name in algorithms:
            if name not in self.algorithms:
                errors.append(f"未知算法: {name}")

        for key, minimum in (('T', 1), ('n_f', 2), ('n_s', 1), ('iters', 1), ('repetitions', 1)):
            value = config.get(key)
            if value is None:
                continue
            if not _is_int(value):
                errors.append(f"{key} 必须为整数: {value!r}")
            elif value < minimum:
                errors.append(f"{key} 必须 ≥ {minimum}: {value}")

        mle_iters = config.get('mle_iters')
        if mle_iters is not None and (not _is_int(mle_iters) or mle_iters < 1):
            errors.append(f"mle_iters 必须为 ≥ 1 的整数: {mle_iters!r}")

        # 评估迭代作用于测试序列，与训练迭代次数无关
        if 'eval_iters' in config:
            eval_iters = config['eval_iters']
            if not isinstance(eval_iters, (list, tuple)) or len(eval_iters) == 0:
                errors.append(f"eval_iters 必须为非空整数列表: {eval_iters!r}")
            else:
                bad = [k for k in eval_iters if not _is_int(k) or k < 1]
                if bad:
                    errors.append(f"eval_iters 各项必须为 ≥ 1 的整数: {bad}")

        jobs = config.get('jobs')
        if jobs is not None and int(jobs) < 1:
            errors.append(f"jobs 必须 ≥ 1: {jobs}")

        seed = config.get('seed')
        if seed is not None and int(seed) < 0:
            errors.append(f"seed 必须为非负整数: {seed}")

        repetitions = config.get('repetitions') or 0
        if isinstance(repetitions, int) and repetitions > LONG_RUN_REPETITIONS:
            warnings.append(f"重复次数 {repetitions} 较大，运行可能耗时较长")
        n_f = config.get('n_f')
        if ALGORITHMS['ENKS'] in algorithms and isinstance(n_f, int) and n_f <= 3:
            warnings.append(f"EnKS 成员数 {n_f} 过少，集合协方差可能奇异")

        return len(errors) == 0, errors, warnings

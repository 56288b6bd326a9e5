"""
配置管理模块

读取 JSON / YAML 实验配置，并按 默认值 < 场景 < 配置文件 < 命令行 的优先级合并。
"""

import json
import os
from typing import Any, Dict, List, Optional

import yaml

from .constants import (
    DEFAULT_ITERS, DEFAULT_KEEP_LAST, DEFAULT_N_F, DEFAULT_N_S, DEFAULT_OUTPUT_DIR,
    DEFAULT_REPETITIONS, DEFAULT_SEED, DEFAULT_T, RESOLVED_CONFIG_FILE, SUPPORTED_FORMATS,
    TRUE_THETAS
)
from .helpers import ensure_directory, merge_dicts
from .logger import get_logger
from ..core.exceptions import InvalidConfig

logger = get_logger(__name__)

DEFAULT_CONFIG: Dict[str, Any] = {
    'model': 'linear',
    'T': DEFAULT_T,
    'seed': DEFAULT_SEED,
    'algorithm': 'cpf_bs',
    'n_f': DEFAULT_N_F,
    'n_s': DEFAULT_N_S,
    'iters': DEFAULT_ITERS,
    'repetitions': DEFAULT_REPETITIONS,
    'out': DEFAULT_OUTPUT_DIR,
    'keep_last': DEFAULT_KEEP_LAST,
    'record_wall_time': False,
    'mode': 'sem',
    'test_T': 1000,
    'eval_iters': [5, 10, 50, 100],
    'mle_iters': 10000,
    'score_component': 1,
}


def load_config_file(file_path: str) -> Dict[str, Any]:
    """
    读取配置文件

    Raises:
        InvalidConfig: 文件不存在、格式不支持或内容不是映射
    """
    if not os.path.exists(file_path):
        raise InvalidConfig(f"配置文件不存在: {file_path}")
    ext = os.path.splitext(file_path)[1].lower()
    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            if ext in SUPPORTED_FORMATS['JSON']:
                data = json.load(f)
            elif ext in SUPPORTED_FORMATS['YAML']:
                data = yaml.safe_load(f)
            else:
                raise InvalidConfig(f"不支持的配置格式: {ext}")
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise InvalidConfig(f"配置文件解析失败: {e}")
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise InvalidConfig("配置文件顶层必须是键值映射")
    return data


class ConfigManager:
    """实验配置管理器"""

    def __init__(self,
                 scenario: Optional[Dict[str, Any]] = None,
                 config_path: Optional[str] = None,
                 overrides: Optional[Dict[str, Any]] = None):
        """
        初始化配置管理器

        Args:
            scenario: 场景注册表中的条目
            config_path: JSON/YAML 配置文件路径
            overrides: 命令行覆盖项（值为 None 的键被忽略）
        """
        self.scenario = dict(scenario or {})
        self.file_config = load_config_file(config_path) if config_path else {}
        self.overrides = dict(overrides or {})
        self._config = self._resolve()

    def _resolve(self) -> Dict[str, Any]:
        """按优先级合并各层配置"""
        layered = merge_dicts(DEFAULT_CONFIG, self.scenario, self.file_config, self.overrides)
        model = layered.get('model')
        if model not in TRUE_THETAS:
            raise InvalidConfig(f"未知模型: {model}")
        # 模型真实参数位于默认值之上、场景之下
        resolved = merge_dicts(DEFAULT_CONFIG, TRUE_THETAS[model], self.scenario,
                               self.file_config, self.overrides)
        if not resolved.get('arms'):
            resolved['arms'] = [{
                'name': resolved['algorithm'],
                'algorithm': resolved['algorithm'],
                'n_f': resolved['n_f'],
                'n_s': resolved['n_s'],
            }]
        else:
            resolved['arms'] = [self._complete_arm(arm, resolved) for arm in resolved['arms']]
        return resolved

    def _complete_arm(self, arm: Dict[str, Any], resolved: Dict[str, Any]) -> Dict[str, Any]:
        if 'algorithm' not in arm:
            raise InvalidConfig(f"算法分组缺少 algorithm 字段: {arm}")
        # 命令行给出的粒子数覆盖场景中各分组的设置
        forced = {k: self.overrides.get(k) for k in ('n_f', 'n_s')}
        completed = merge_dicts({'n_f': resolved['n_f'], 'n_s': resolved['n_s']}, arm, forced)
        completed.setdefault('name', arm['algorithm'])
        return completed

    def get(self, key: str, default: Any = None) -> Any:
        """获取配置值"""
        return self._config.get(key, default)

    def as_dict(self) -> Dict[str, Any]:
        """合并后的完整配置"""
        return dict(self._config)

    def get_arms(self) -> List[Dict[str, Any]]:
        """算法分组列表"""
        return [dict(arm) for arm in self._config['arms']]

    def export_config(self, directory: Optional[str] = None) -> Optional[str]:
        """把合并后的配置写入输出目录"""
        directory = directory or self._config['out']
        try:
            ensure_directory(directory)
            file_path = os.path.join(directory, RESOLVED_CONFIG_FILE)
            with open(file_path, 'w', encoding='utf-8') as f:
                json.dump(self._config, f, ensure_ascii=False, indent=2, sort_keys=True, default=str)
            return file_path
        except OSError as e:
            logger.error(f"导出配置失败: {e}")
            return None

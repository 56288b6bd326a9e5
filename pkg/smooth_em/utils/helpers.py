"""
辅助函数模块

提供各种实用的辅助函数。
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Optional


def ensure_directory(directory: str) -> None:
    """确保目录存在，不存在则创建"""
    Path(directory).mkdir(parents=True, exist_ok=True)


def format_duration(seconds: float) -> str:
    """格式化耗时显示"""
    if seconds < 1:
        return f"{seconds * 1000:.0f} ms"
    elif seconds < 60:
        return f"{seconds:.1f} s"
    elif seconds < 3600:
        return f"{seconds / 60:.1f} min"
    else:
        return f"{seconds / 3600:.1f} h"


def format_count(count: int) -> str:
    """格式化大数显示"""
    if count < 1000:
        return str(count)
    elif count < 1000 ** 2:
        return f"{count / 1000:.1f}K"
    elif count < 1000 ** 3:
        return f"{count / 1000 ** 2:.1f}M"
    else:
        return f"{count / 1000 ** 3:.1f}G"


def calculate_md5(text: str) -> str:
    """计算文本的MD5哈希值"""
    return hashlib.md5(text.encode('utf-8')).hexdigest()


def stable_key(value: Any) -> int:
    """把任意键转换为跨进程稳定的32位整数（用于随机流拆分）"""
    if isinstance(value, int) and value >= 0:
        return value
    return int(calculate_md5(str(value))[:8], 16)


def config_fingerprint(config: Dict[str, Any]) -> str:
    """计算配置字典的指纹"""
    return calculate_md5(json.dumps(config, sort_keys=True, default=str))[:12]


def parse_int_list(text: str) -> List[int]:
    """解析逗号分隔的整数列表，如 "5,10,50" """
    if not text:
        return []
    return [int(part) for part in text.split(',') if part.strip()]


def merge_dicts(base: Dict[str, Any], *overrides: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    """按顺序合并字典，后者覆盖前者，值为None的键被忽略"""
    result = dict(base)
    for override in overrides:
        if not override:
            continue
        for key, value in override.items():
            if value is not None:
                result[key] = value
    return result

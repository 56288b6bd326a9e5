"""
工具模块

包含日志、辅助函数与常量。配置管理位于 utils.config，按需导入。
"""

from .logger import setup_logger, get_logger
from .constants import *

__all__ = [
    'setup_logger',
    'get_logger'
]

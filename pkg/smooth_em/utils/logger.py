"""
日志工具模块

提供应用程序的日志记录功能。
"""

import logging
import logging.handlers
import os
import traceback
from typing import Optional

from .constants import APP_LOGGER, LOG_DIR
from .helpers import ensure_directory


def setup_logger(name: str = APP_LOGGER,
                 level: str = 'INFO',
                 log_file: Optional[str] = None,
                 max_file_size: int = 10 * 1024 * 1024,  # 10MB
                 backup_count: int = 5,
                 console: bool = True) -> logging.Logger:
    """
    设置日志记录器

    Args:
        name: 日志器名称
        level: 日志级别 ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')
        log_file: 日志文件路径，如果为None则使用默认路径
        max_file_size: 单个日志文件最大大小（字节）
        backup_count: 保留的备份文件数量
        console: 是否输出到控制台

    Returns:
        配置好的日志器
    """
    if log_file is None:
        ensure_directory(LOG_DIR)
        log_file = os.path.join(LOG_DIR, f"{name}.log")
    else:
        ensure_directory(os.path.dirname(os.path.abspath(log_file)))

    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))

    # 清除现有的处理器，避免重复
    for handler in list(logger.handlers):
        handler.close()
    logger.handlers.clear()

    # 文件处理器（带轮转）
    file_handler = logging.handlers.RotatingFileHandler(
        log_file,
        maxBytes=max_file_size,
        backupCount=backup_count,
        encoding='utf-8'
    )
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    ))
    logger.addHandler(file_handler)

    if console:
        console_handler = logging.StreamHandler()
        console_handler.setLevel(getattr(logging, level.upper(), logging.INFO))
        console_handler.setFormatter(logging.Formatter('%(levelname)s - %(message)s'))
        logger.addHandler(console_handler)

    return logger


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """
    获取日志器

    Args:
        name: 日志器名称，如果为None则使用应用程序日志器；
              模块传入 __name__，得到 smooth_em 的子日志器

    Returns:
        日志器实例
    """
    if name is None:
        name = APP_LOGGER

    logger = logging.getLogger(name)

    # 库模式下未调用 setup_logger 时保持静默
    root = logging.getLogger(APP_LOGGER)
    if not root.handlers:
        root.addHandler(logging.NullHandler())

    return logger


class RunLogger:
    """实验运行审计日志器"""

    def __init__(self, output_dir: str):
        self.logger = get_logger(f"{APP_LOGGER}.run")
        ensure_directory(output_dir)
        self.audit_file = os.path.join(output_dir, "audit.log")

        self._handler = logging.handlers.RotatingFileHandler(
            self.audit_file,
            maxBytes=5 * 1024 * 1024,  # 5MB
            backupCount=10,
            encoding='utf-8'
        )
        self._handler.setFormatter(logging.Formatter(
            '%(asctime)s - AUDIT - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))

        # 每个输出目录一个审计日志器
        self.audit_logger = logging.getLogger(f"{APP_LOGGER}.audit.{os.path.abspath(output_dir)}")
        self.audit_logger.setLevel(logging.INFO)
        self.audit_logger.handlers.clear()
        self.audit_logger.addHandler(self._handler)
        self.audit_logger.propagate = False

    def log_operation(self, command: str, target: str, details: Optional[str] = None,
                      success: bool = True) -> None:
        """
        记录运行日志

        Args:
            command: 子命令 (SIMULATE, SMOOTH, ESTIMATE, CROSSVAL, REPETITION等)
            target: 操作目标 (场景名、重复编号等)
            details: 详情
            success: 是否成功
        """
        status = "SUCCESS" if success else "FAILED"
        message = f"{command} - {target} - {status}"
        if details:
            message += f" - {details}"

        if success:
            self.logger.info(message)
        else:
            self.logger.error(message)
        self.audit_logger.info(message)

    def log_repetition(self, arm: str, repetition: int, details: Optional[str] = None,
                       success: bool = True) -> None:
        """记录单次重复实验"""
        self.log_operation("REPETITION", f"{arm}#{repetition}", details, success)

    def close(self) -> None:
        """关闭审计文件"""
        self.audit_logger.removeHandler(self._handler)
        self._handler.close()


def log_exception(logger: logging.Logger, exception: Exception,
                  context: Optional[str] = None) -> None:
    """
    记录异常信息

    Args:
        logger: 日志器实例
        exception: 异常对象
        context: 异常上下文信息
    """
    error_msg = f"发生异常: {type(exception).__name__}: {exception}"
    if context:
        error_msg = f"{context} - {error_msg}"

    logger.error(error_msg)
    logger.debug(f"堆栈信息:\n{traceback.format_exc()}")


def create_performance_logger(log_dir: str) -> logging.Logger:
    """创建性能监控日志器"""
    perf_logger = logging.getLogger(f"{APP_LOGGER}.performance")
    perf_logger.setLevel(logging.DEBUG)

    ensure_directory(log_dir)
    perf_file = os.path.join(log_dir, "performance.log")
    for handler in list(perf_logger.handlers):
        handler.close()
    perf_logger.handlers.clear()
    perf_handler = logging.handlers.RotatingFileHandler(
        perf_file,
        maxBytes=5 * 1024 * 1024,  # 5MB
        backupCount=3,
        encoding='utf-8'
    )
    perf_handler.setFormatter(logging.Formatter(
        '%(asctime)s - PERF - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    ))
    perf_logger.addHandler(perf_handler)
    perf_logger.propagate = False

    return perf_logger

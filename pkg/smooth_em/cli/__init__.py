"""
命令行层

场景注册表、实验控制器、重复任务执行器与 CSV 读写。
"""

from .commands import COMMANDS, ExperimentController
from .scenarios import SCENARIOS, get_scenario, list_scenarios, scenario_command

__all__ = [
    'COMMANDS', 'ExperimentController',
    'SCENARIOS', 'get_scenario', 'list_scenarios', 'scenario_command',
]

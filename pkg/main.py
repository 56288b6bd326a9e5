"""
SmoothEM - 主入口文件

解析命令行参数，合并实验配置并分派到 simulate / smooth / estimate / crossval / list-scenarios。
"""

import sys
import argparse
from pathlib import Path
from typing import List, Optional

# 确保能够导入项目模块
sys.path.insert(0, str(Path(__file__).parent))

from smooth_em.cli import COMMANDS, ExperimentController, get_scenario, list_scenarios, scenario_command
from smooth_em.core.exceptions import ConfigError, NumericalError, SmoothEMException, ValidationError
from smooth_em.utils.config import ConfigManager
from smooth_em.utils.constants import APP_DESCRIPTION, APP_NAME, APP_VERSION, EXIT_CODES
from smooth_em.utils.helpers import parse_int_list
from smooth_em.utils.logger import get_logger, log_exception, setup_logger


def build_parser() -> argparse.ArgumentParser:
    """构造命令行解析器"""
    parser = argparse.ArgumentParser(
        prog="smooth_em",
        description=f"{APP_NAME} - {APP_DESCRIPTION}",
    )
    parser.add_argument(
        "--version", "-v",
        action="version",
        version=f"{APP_NAME} {APP_VERSION}"
    )

    # 各子命令共用的参数
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, help="JSON / YAML 配置文件路径")
    common.add_argument("--scenario", type=str, help="场景名（见 list-scenarios）")
    common.add_argument("--seed", type=int, help="随机种子（非负整数）")
    common.add_argument("--jobs", type=int, help="并行进程数，默认为物理核心数")
    common.add_argument("--out", type=str, help="输出目录")
    common.add_argument("--max-evals", type=int, dest="max_evals", help="允许的最大模型演化次数")
    common.add_argument("--model", type=str, choices=["linear", "kitagawa", "lorenz"], help="模型类型")
    common.add_argument("--algorithm", type=str, help="算法 (cpf, cpf_as, cpf_bs, pf_bs, enks)")
    common.add_argument("--T", type=int, dest="T", help="序列长度")
    common.add_argument("--n-f", type=int, dest="n_f", help="滤波粒子数")
    common.add_argument("--n-s", type=int, dest="n_s", help="每次迭代抽取的轨迹数")
    common.add_argument("--iters", type=int, help="迭代次数")
    common.add_argument("--repetitions", type=int, help="重复次数")
    common.add_argument("--eval-iters", type=parse_int_list, dest="eval_iters",
                        help="交叉验证的评分迭代数，逗号分隔，如 5,10,50")
    common.add_argument("--debug", action="store_true", help="启用调试模式")
    common.add_argument("--log-file", type=str, dest="log_file", help="日志文件路径")

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    helps = {
        'simulate': "模拟真实轨迹与观测",
        'smooth': "平滑重构",
        'estimate': "重复参数估计",
        'crossval': "交叉验证评分",
    }
    for command in COMMANDS:
        subparsers.add_parser(command, parents=[common], help=helps[command])
    subparsers.add_parser("list-scenarios", help="列出内置场景")
    return parser


def collect_overrides(args: argparse.Namespace) -> dict:
    """命令行覆盖项（未给出的参数为 None，合并时被忽略）"""
    keys = ('seed', 'jobs', 'out', 'max_evals', 'model', 'algorithm', 'T', 'n_f', 'n_s',
            'iters', 'repetitions', 'eval_iters')
    return {key: getattr(args, key, None) for key in keys}


def print_scenarios() -> None:
    """打印场景列表"""
    rows = list_scenarios()
    width = max(len(name) for name, _, _ in rows)
    for name, command, anchor in rows:
        print(f"{name:<{width}}  {command:<9}  {anchor}")


def run(args: argparse.Namespace) -> int:
    """执行子命令并返回退出码"""
    logger = get_logger()
    try:
        scenario = None
        if args.scenario:
            scenario = get_scenario(args.scenario)
            expected = scenario_command(args.scenario)
            if expected != args.command:
                logger.warning(f"场景 {args.scenario} 对应子命令 {expected}，当前为 {args.command}")
        config_manager = ConfigManager(scenario=scenario, config_path=args.config,
                                       overrides=collect_overrides(args))
        controller = ExperimentController(config_manager, args.scenario)
        files = controller.run(args.command)
        for file_path in files:
            logger.debug(f"写出 {file_path}")
        return EXIT_CODES['SUCCESS']

    except (ConfigError, ValidationError) as e:
        log_exception(logger, e, "配置错误")
        print(f"配置错误: {e}", file=sys.stderr)
        return EXIT_CODES['CONFIG_ERROR']
    except NumericalError as e:
        log_exception(logger, e, "数值计算失败")
        print(f"数值计算失败: {e}", file=sys.stderr)
        return EXIT_CODES['NUMERICAL_ERROR']
    except (SmoothEMException, OSError) as e:
        log_exception(logger, e, "运行失败")
        print(f"运行失败: {e}", file=sys.stderr)
        return EXIT_CODES['FAILURE']


def main(argv: Optional[List[str]] = None) -> int:
    """主函数"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "list-scenarios":
        print_scenarios()
        return EXIT_CODES['SUCCESS']

    # 设置日志
    log_level = "DEBUG" if args.debug else "INFO"
    logger = setup_logger(level=log_level, log_file=args.log_file)
    logger.info(f"启动 {APP_NAME} v{APP_VERSION}: {args.command}")

    try:
        return run(args)
    except Exception as e:
        logger.error(f"运行失败: {e}", exc_info=True)
        return EXIT_CODES['FAILURE']


if __name__ == "__main__":
    # 设置异常处理
    def handle_exception(exc_type, exc_value, exc_traceback):
        """全局异常处理"""
        if issubclass(exc_type, KeyboardInterrupt):
            sys.__excepthook__(exc_type, exc_value, exc_traceback)
            return

        logger = get_logger()
        logger.critical(
            "未捕获的异常",
            exc_info=(exc_type, exc_value, exc_traceback)
        )

    sys.excepthook = handle_exception

    exit_code = main()
    sys.exit(exit_code)

"""
实验控制器

把合并后的配置转换为 simulate / smooth / estimate / crossval 四类实验，
负责数据集、重复任务、结果表与审计日志。
"""

import os
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from . import csv_io
from .runner import (
    Dataset, RepetitionResult, RepetitionTask, build_theta, check_budget, data_overrides,
    default_jobs, family_of, log_performance, make_dataset, raise_failures, run_repetitions
)
from ..core.estimation import sample_theta0
from ..core.exceptions import InvalidConfig, SmoothEMException
from ..core.kalman import kalman_filter, ks_em
from ..core.metrics import degeneracy_profile, summarize_reconstruction, violin_summary
from ..core.rng import RngStream
from ..core.smoothing import SmootherVariant, iterate_smoother, stack_samples
from ..core.validator import Validator
from ..models.ssm import build_model
from ..models.theta import ModelFamily, Theta, update_params
from ..models.trace_model import SemTrace
from ..utils.config import ConfigManager
from ..utils.constants import CSV_HEADERS
from ..utils.helpers import config_fingerprint, format_duration
from ..utils.logger import RunLogger, create_performance_logger, get_logger, log_exception

logger = get_logger(__name__)

COMMANDS = ('simulate', 'smooth', 'estimate', 'crossval')


class ExperimentController:
    """实验控制器"""

    def __init__(self, config_manager: ConfigManager, scenario_name: Optional[str] = None):
        """
        初始化控制器

        Args:
            config_manager: 合并后的配置
            scenario_name: 场景名，参与随机流派生；自定义配置为 'custom'
        """
        self.config_manager = config_manager
        self.config = config_manager.as_dict()
        self.scenario_name = scenario_name or 'custom'
        self.validator = Validator()
        self.out_dir = self.config['out']
        self.root = RngStream(int(self.config['seed']))
        self.family = family_of(self.config)
        self._datasets: Dict[str, Dataset] = {}
        self.run_logger: Optional[RunLogger] = None
        self.perf_logger = None

    # ------------------------------------------------------------------ 准备

    def validate(self) -> None:
        """
        验证合并后的配置

        Raises:
            InvalidConfig: 存在错误项
        """
        arms = self.config['arms']
        checked = dict(self.config)
        checked['algorithms'] = [arm['algorithm'] for arm in arms]
        _, errors, warnings = self.validator.validate_experiment_config(checked)
        for arm in arms:
            _, arm_errors, _ = self.validator.validate_experiment_config(
                {'model': self.config['model'], 'n_f': arm['n_f'], 'n_s': arm['n_s'],
                 'dt': arm.get('dt')}
            )
            errors.extend(f"{arm['name']}: {e}" for e in arm_errors)
        for warning in warnings:
            logger.warning(warning)
        if errors:
            raise InvalidConfig("; ".join(errors))

    def _start(self, command: str) -> None:
        self.validate()
        check_budget(self.config, command)
        self.run_logger = RunLogger(self.out_dir)
        self.perf_logger = create_performance_logger(self.out_dir)
        self.config_manager.export_config(self.out_dir)
        logger.info(f"开始 {command}: 场景 {self.scenario_name}, 输出目录 {self.out_dir}")

    def _finish(self, command: str, details: str, success: bool = True) -> None:
        if self.run_logger is not None:
            self.run_logger.log_operation(command.upper(), self.scenario_name, details, success)
            self.run_logger.close()
            self.run_logger = None

    def run(self, command: str) -> List[str]:
        """
        执行子命令

        Returns:
            写出的文件列表
        """
        handlers = {
            'simulate': self.cmd_simulate,
            'smooth': self.cmd_smooth,
            'estimate': self.cmd_estimate,
            'crossval': self.cmd_crossval,
        }
        if command not in handlers:
            raise InvalidConfig(f"未知子命令: {command}")
        self._start(command)
        try:
            files = handlers[command]()
        except SmoothEMException as e:
            log_exception(logger, e, f"{command} 失败")
            self._finish(command, str(e), success=False)
            raise
        self._finish(command, f"写出 {len(files)} 个文件")
        logger.info(f"{command} 完成，写出 {len(files)} 个文件")
        return files

    # ------------------------------------------------------------------ 数据

    def _path(self, *parts: str) -> str:
        return os.path.join(self.out_dir, *parts)

    def dataset(self, overrides: Optional[Dict[str, Any]] = None) -> Dataset:
        """训练数据集（按模型覆盖项缓存）"""
        overrides = overrides or {}
        key = config_fingerprint(overrides)
        if key not in self._datasets:
            self._datasets[key] = make_dataset(self.config, self.root, overrides)
        return self._datasets[key]

    def _theta0(self, dataset: Dataset, repetition: int) -> Theta:
        """
        初始参数：配置给出 theta0 时直接使用，否则从均匀区间抽取

        随机流只依赖 (场景, 重复编号)，同一次重复的各算法分组共用 θ̂_0。
        """
        fixed = self.config_manager.get('theta0')
        if fixed:
            return update_params(dataset.theta, fixed)
        return sample_theta0(self.family, self.root.split(self.scenario_name, 'theta0', repetition),
                             ranges=self.config_manager.get('theta0_ranges'), base=dataset.theta)

    def _tasks(self, repetitions: int) -> List[RepetitionTask]:
        tasks = []
        for arm in self.config['arms']:
            dataset = self.dataset(data_overrides(arm))
            for k in range(1, repetitions + 1):
                tasks.append(RepetitionTask(
                    scenario=self.scenario_name,
                    arm=arm,
                    repetition=k,
                    seed=int(self.config['seed']),
                    theta0=self._theta0(dataset, k),
                    y=dataset.y,
                    iters=int(self.config['iters']),
                    keep_last=int(self.config['keep_last']),
                    record_wall_time=bool(self.config['record_wall_time']),
                ))
        return tasks

    def _execute(self, repetitions: int) -> List[RepetitionResult]:
        tasks = self._tasks(repetitions)
        jobs = int(self.config_manager.get('jobs') or default_jobs())
        results = run_repetitions(tasks, jobs)
        for result in results:
            self.run_logger.log_repetition(
                result.arm, result.repetition,
                result.error or f"耗时 {format_duration(result.elapsed)}",
                success=result.error is None,
            )
        total, peak = log_performance(self.perf_logger, results)
        logger.info(f"{len(results)} 次重复累计耗时 {format_duration(total)}，"
                    f"峰值内存 {peak / 1024 ** 2:.1f} MB")
        raise_failures(results)
        return results

    def _variant(self, arm: Dict[str, Any]) -> SmootherVariant:
        try:
            return SmootherVariant(arm['algorithm'])
        except ValueError:
            raise InvalidConfig(f"{arm['name']}: 算法 {arm['algorithm']} 不支持固定参数平滑")

    # ------------------------------------------------------------------ 子命令

    def cmd_simulate(self) -> List[str]:
        """模拟真实轨迹与观测"""
        dataset = self.dataset()
        return [
            csv_io.write_truth(dataset.truth.states, self._path('truth.csv')),
            csv_io.write_observations(dataset.y, self._path('obs.csv')),
        ]

    def cmd_estimate(self) -> List[str]:
        """重复运行参数估计并写出迭代记录与汇总表"""
        results = self._execute(int(self.config['repetitions']))
        files = []
        for result in results:
            files.append(csv_io.write_frame(
                result.trace.to_frame(),
                self._path(result.arm, f"sem_trace_rep{result.repetition}.csv"),
            ))

        traces = [result.trace for result in results]
        names = list(traces[0].param_names)
        rows = [
            [result.arm, result.repetition] + [result.trace.final_params[p] for p in names]
            + [float(result.trace.records[-1].loglik)]
            for result in results
        ]
        final = pd.DataFrame(rows, columns=['arm', 'rep'] + names + ['loglik'])
        files.append(csv_io.write_frame(final, self._path('estimates_final.csv')))

        violin = pd.concat([violin_summary(traces, p) for p in names + ['loglik']], ignore_index=True)
        files.append(csv_io.write_frame(violin, self._path('violin_summary.csv')))

        if self.family is ModelFamily.LINEAR:
            files.append(self._write_mle())
        return files

    def _write_mle(self) -> str:
        """线性模型的 KS-EM 极大似然估计（从真实参数出发）"""
        dataset = self.dataset()
        theta, _ = ks_em(dataset.theta, dataset.y, int(self.config['mle_iters']))
        _, loglik = kalman_filter(theta, dataset.y)
        params = theta.params()
        frame = pd.DataFrame([list(params.values()) + [loglik]], columns=list(params) + ['loglik'])
        logger.info(f"KS-EM 极大似然估计: {params}")
        return csv_io.write_frame(frame, self._path('ks_em_mle.csv'))

    def cmd_smooth(self) -> List[str]:
        """平滑重构：sem 模式为一次随机EM，fixed 模式为固定参数下的迭代平滑"""
        mode = self.config_manager.get('mode', 'sem')
        if mode == 'sem':
            files = self._smooth_sem()
        elif mode == 'fixed':
            files = self._smooth_fixed()
        else:
            raise InvalidConfig(f"未知平滑模式: {mode}")
        dataset = self.dataset()
        files.append(csv_io.write_truth(dataset.truth.states, self._path('truth.csv')))
        files.append(csv_io.write_observations(dataset.y, self._path('obs.csv')))
        return files

    def _suffix(self, arm: Dict[str, Any]) -> str:
        return f"_{arm['name']}" if len(self.config['arms']) > 1 else ""

    def _smooth_sem(self) -> List[str]:
        results = self._execute(1)
        files = []
        scores = []
        for arm, result in zip(self.config['arms'], results):
            dataset = self.dataset(data_overrides(arm))
            summary = summarize_reconstruction(result.trace.pooled_samples(), dataset.truth)
            suffix = self._suffix(arm)
            files.append(csv_io.write_frame(summary.to_frame(), self._path(f"reconstruction{suffix}.csv")))
            files.append(csv_io.write_frame(result.trace.to_frame(), self._path(f"sem_trace{suffix}.csv")))
            scores.append(summary.scores_frame(arm['name']))
            logger.info(f"{arm['name']} 重构: RMSE={np.round(summary.rmse, 4).tolist()}, "
                        f"CP={np.round(summary.cp, 4).tolist()}")
        files.append(csv_io.write_frame(pd.concat(scores, ignore_index=True), self._path('scores.csv')))
        return files

    def _smooth_fixed(self) -> List[str]:
        files = []
        scores = []
        iters = int(self.config['iters'])
        for arm in self.config['arms']:
            variant = self._variant(arm)
            dataset = self.dataset(data_overrides(arm))
            theta = build_theta(self.config, {**data_overrides(arm), **arm.get('theta', {})})
            rng = self.root.split(self.scenario_name, 'smooth', arm['name'])
            sample_sets = iterate_smoother(build_model(theta), dataset.y, variant,
                                           int(arm['n_f']), int(arm['n_s']), iters, rng)
            rows = []
            for r, samples in enumerate(sample_sets, start=1):
                array = stack_samples(samples)
                for t, count in enumerate(degeneracy_profile(array)):
                    rows.append([r, t, int(count)])
                if len(samples) >= 2:
                    summary = summarize_reconstruction(array, dataset.truth)
                    files.append(csv_io.write_frame(
                        summary.to_frame(), self._path(f"reconstruction_{arm['name']}_iter{r}.csv")
                    ))
                    if r == iters:
                        scores.append(summary.scores_frame(arm['name']))
            degeneracy = pd.DataFrame(rows, columns=CSV_HEADERS['DEGENERACY'])
            files.append(csv_io.write_frame(degeneracy, self._path(f"degeneracy_{arm['name']}.csv")))
            self.run_logger.log_operation("SMOOTH", arm['name'], f"{iters} 次平滑迭代")
        if scores:
            files.append(csv_io.write_frame(pd.concat(scores, ignore_index=True), self._path('scores.csv')))
        return files

    def cmd_crossval(self) -> List[str]:
        """
        交叉验证

        在训练序列上重复估计参数并取最终估计的算术平均，再在新的长测试序列上
        以该参数运行迭代平滑；迭代 k 的评分合并第 1..k 次迭代的样本。
        """
        results = self._execute(int(self.config['repetitions']))
        eval_iters = sorted(int(k) for k in self.config['eval_iters'])
        component = int(self.config['score_component'])
        files = []

        estimate_rows = []
        table_rows = []
        for arm in self.config['arms']:
            variant = self._variant(arm)
            traces: List[SemTrace] = [r.trace for r in results if r.arm == arm['name']]
            dataset = self.dataset(data_overrides(arm))
            names = traces[0].param_names
            means = {p: float(np.mean([trace.final_params[p] for trace in traces])) for p in names}
            theta = update_params(dataset.theta, means)
            estimate_rows.append([arm['name']] + [means[p] for p in names])
            logger.info(f"{arm['name']} 训练估计均值: {means}")

            test = make_dataset(self.config, self.root, data_overrides(arm),
                                T=int(self.config['test_T']), tag='test')
            if component >= test.truth.d_x:
                raise InvalidConfig(f"score_component={component} 超出状态维数 {test.truth.d_x}")
            rng = self.root.split(self.scenario_name, 'crossval', arm['name'])
            sample_sets = iterate_smoother(build_model(theta), test.y, variant,
                                           int(arm['n_f']), int(arm['n_s']), eval_iters[-1], rng)
            for k in eval_iters:
                pooled = np.concatenate([stack_samples(s) for s in sample_sets[:k]], axis=0)
                summary = summarize_reconstruction(pooled, test.truth)
                table_rows.append([arm['name'], k, float(summary.rmse[component]), float(summary.cp[component])])

        names = results[0].trace.param_names
        files.append(csv_io.write_frame(pd.DataFrame(estimate_rows, columns=['arm'] + list(names)),
                                        self._path('estimates_train.csv')))
        files.append(csv_io.write_frame(pd.DataFrame(table_rows, columns=CSV_HEADERS['TABLE1']),
                                        self._path('table1.csv')))
        return files

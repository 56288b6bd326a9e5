"""
实验场景注册表

每个场景给出子命令、模型设置与算法分组 (arms)，以及对应的实验出处。
"""

from typing import Any, Dict, List, Optional, Tuple

from ..core.exceptions import InvalidConfig


def _arm(algorithm: str, n_f: int, n_s: int, name: Optional[str] = None, **extra: Any) -> Dict[str, Any]:
    arm = {'name': name or algorithm, 'algorithm': algorithm, 'n_f': n_f, 'n_s': n_s}
    arm.update(extra)
    return arm


SCENARIOS: Dict[str, Dict[str, Any]] = {
    'linear': {
        'anchor': "线性高斯模型默认设置 θ*=(0.9, 1, 1), T=100",
        'command': 'simulate',
        'model': 'linear',
    },
    'kitagawa': {
        'anchor': "Kitagawa 模型默认设置 θ*=(1, 10), T=100",
        'command': 'simulate',
        'model': 'kitagawa',
    },
    'lorenz': {
        'anchor': "Lorenz-63 默认设置 θ*=(1, 2), Δ=0.15, T=100",
        'command': 'simulate',
        'model': 'lorenz',
    },
    'fig1': {
        'anchor': "Lorenz-63 全观测，真参数 (0.01I, 2I) 与错误参数 (I, I) 下的 PF-BS 平滑",
        'command': 'smooth',
        'mode': 'fixed',
        'model': 'lorenz',
        'sigma_q2': 0.01,
        'sigma_r2': 2.0,
        'observed': [0, 1, 2],
        'iters': 1,
        'arms': [
            _arm('pf_bs', 100, 10, name='true_theta'),
            _arm('pf_bs', 100, 10, name='wrong_theta', theta={'sigma_q2': 1.0, 'sigma_r2': 1.0}),
        ],
    },
    'fig5': {
        'anchor': "Kitagawa T=30 上 CPF / CPF-AS / CPF-BS 的退化对比",
        'command': 'smooth',
        'mode': 'fixed',
        'model': 'kitagawa',
        'T': 30,
        'iters': 5,
        'arms': [_arm('cpf', 10, 10), _arm('cpf_as', 10, 10), _arm('cpf_bs', 10, 10)],
    },
    'fig6': {
        'anchor': "零条件轨迹出发的迭代 CPF-BS 平滑，3 次迭代",
        'command': 'smooth',
        'mode': 'fixed',
        'model': 'kitagawa',
        'T': 30,
        'iters': 3,
        'arms': [_arm('cpf_bs', 10, 10)],
    },
    'fig7': {
        'anchor': "线性模型 CPF-BS-SEM 与 CPF-AS-SEM，100 次重复",
        'command': 'estimate',
        'model': 'linear',
        'arms': [_arm('cpf_bs', 10, 10), _arm('cpf_as', 10, 10)],
    },
    'fig8': {
        'anchor': "线性模型不同粒子数下 PF-BS-SEM / CPF-BS-SEM / CPF-AS-SEM 的最终估计",
        'command': 'estimate',
        'model': 'linear',
        'arms': [
            _arm(algorithm, n, n, name=f"{algorithm}_{n}")
            for n in (10, 100, 1000)
            for algorithm in ('pf_bs', 'cpf_bs', 'cpf_as')
        ],
    },
    'fig9': {
        'anchor': "线性模型 CPF-BS-SEM 重构，最后 10 次迭代的样本",
        'command': 'smooth',
        'mode': 'sem',
        'model': 'linear',
        'arms': [_arm('cpf_bs', 10, 10)],
    },
    'fig10': {
        'anchor': "Kitagawa 模型 CPF-BS-SEM 与 CPF-AS-SEM",
        'command': 'estimate',
        'model': 'kitagawa',
        'arms': [_arm('cpf_bs', 10, 10), _arm('cpf_as', 10, 10)],
    },
    'fig11': {
        'anchor': "Kitagawa 模型 N_f=10, N_s ∈ {1, 5, 10}",
        'command': 'estimate',
        'model': 'kitagawa',
        'arms': [
            _arm(algorithm, 10, n_s, name=f"{algorithm}_ns{n_s}")
            for n_s in (1, 5, 10)
            for algorithm in ('cpf_bs', 'cpf_as')
        ],
    },
    'fig12': {
        'anchor': "Kitagawa 模型 CPF-BS-SEM 重构",
        'command': 'smooth',
        'mode': 'sem',
        'model': 'kitagawa',
        'arms': [_arm('cpf_bs', 10, 10)],
    },
    'fig13': {
        'anchor': "Lorenz-63 (Δ=0.15) CPF-BS-SEM 与 CPF-AS-SEM，20 个粒子",
        'command': 'estimate',
        'model': 'lorenz',
        'arms': [_arm('cpf_bs', 20, 20), _arm('cpf_as', 20, 20)],
    },
    'fig14': {
        'anchor': "Lorenz-63 Δ ∈ {0.01, 0.08, 0.15} 下 CPF-BS-SEM / CPF-AS-SEM / EnKS-EM，20 个成员",
        'command': 'estimate',
        'model': 'lorenz',
        'arms': [
            _arm(algorithm, 20, 20, name=f"{algorithm}_dt{dt}", dt=dt)
            for dt in (0.01, 0.08, 0.15)
            for algorithm in ('cpf_bs', 'cpf_as', 'enks')
        ],
    },
    'fig15': {
        'anchor': "Lorenz-63 CPF-BS-SEM 重构，20 个粒子",
        'command': 'smooth',
        'mode': 'sem',
        'model': 'lorenz',
        'arms': [_arm('cpf_bs', 20, 20)],
    },
    'table1': {
        'anchor': "长度 T'=1000 测试序列上 CPF-BS 与 CPF-AS 对未观测分量的 RMSE / CP",
        'command': 'crossval',
        'model': 'lorenz',
        'test_T': 1000,
        'eval_iters': [5, 10, 50, 100],
        'score_component': 1,
        'arms': [_arm('cpf_bs', 20, 20), _arm('cpf_as', 20, 20)],
    },
}

# 仅用于展示与命令分派，不参与配置合并
_META_KEYS = ('anchor', 'command')


def list_scenarios() -> List[Tuple[str, str, str]]:
    """(名称, 子命令, 出处) 列表"""
    return [(name, entry['command'], entry['anchor']) for name, entry in SCENARIOS.items()]


def get_scenario(name: str) -> Dict[str, Any]:
    """
    获取场景配置（不含展示字段）

    Raises:
        InvalidConfig: 场景不存在
    """
    if name not in SCENARIOS:
        raise InvalidConfig(f"未知场景: {name}，可用场景: {', '.join(SCENARIOS)}")
    return {k: v for k, v in SCENARIOS[name].items() if k not in _META_KEYS}


def scenario_command(name: str) -> str:
    """场景对应的子命令"""
    return SCENARIOS[name]['command']

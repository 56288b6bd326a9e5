"""
场景级复现检查

通过命令行运行内置场景，对最终估计与重构评分做分布性判定。
全部标记为 slow，运行方式: python -m pytest tests/ -m slow
"""

import json

import numpy as np
import pandas as pd
import pytest

from main import main

pytestmark = pytest.mark.slow


def _run(command, out, *extra):
    argv = [command, '--out', str(out), '--log-file', str(out.parent / 'logs' / f'{out.name}.log')]
    assert main(argv + list(extra)) == 0


def _config(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding='utf-8')
    return str(path)


def _iqr(values):
    q25, q75 = np.quantile(values, [0.25, 0.75])
    return q75 - q25


@pytest.fixture(scope='module')
def linear_estimates(tmp_path_factory):
    """线性模型 n_f=n_s=10 的 PF-BS / CPF-BS / CPF-AS 最终估计与 KS-EM 极大似然估计"""
    root = tmp_path_factory.mktemp('linear')
    arms = [{'algorithm': name, 'n_f': 10, 'n_s': 10} for name in ('cpf_bs', 'cpf_as', 'pf_bs')]
    config = _config(root, 'exp.json', {'arms': arms})
    out = root / 'fig7'
    _run('estimate', out, '--scenario', 'fig7', '--config', config, '--repetitions', '50')
    final = pd.read_csv(out / 'estimates_final.csv')
    mle = pd.read_csv(out / 'ks_em_mle.csv').iloc[0]
    return final, mle


def test_sem_medians_track_maximum_likelihood(linear_estimates):
    final, mle = linear_estimates
    for arm in ('cpf_bs', 'cpf_as'):
        group = final[final['arm'] == arm]
        assert abs(group['A'].median() - mle['A']) <= 0.05
        assert abs(group['Q'].median() - mle['Q']) <= 0.3
        assert abs(group['R'].median() - mle['R']) <= 0.3


def test_backward_simulation_narrows_estimate_spread(linear_estimates):
    final, _ = linear_estimates
    backward = final[final['arm'] == 'cpf_bs']
    ancestor = final[final['arm'] == 'cpf_as']
    for param in ('A', 'Q', 'R'):
        assert _iqr(backward[param]) <= _iqr(ancestor[param])


def test_unconditional_smoother_is_biased_with_few_particles(linear_estimates):
    final, mle = linear_estimates
    bias = {
        arm: abs(final[final['arm'] == arm]['Q'].median() - mle['Q'])
        for arm in ('pf_bs', 'cpf_bs')
    }
    assert bias['pf_bs'] >= 2 * bias['cpf_bs']


def test_trajectory_count_effect_on_kitagawa_spread(tmp_path):
    arms = [
        {'name': f'{algorithm}_ns{n_s}', 'algorithm': algorithm, 'n_f': 10, 'n_s': n_s}
        for algorithm, n_s in (('cpf_as', 1), ('cpf_as', 10), ('cpf_bs', 1), ('cpf_bs', 5))
    ]
    config = _config(tmp_path, 'exp.json', {'arms': arms})
    out = tmp_path / 'fig11'
    _run('estimate', out, '--scenario', 'fig11', '--config', config, '--iters', '50')
    final = pd.read_csv(out / 'estimates_final.csv')

    def spread(arm, param):
        return _iqr(final[final['arm'] == arm][param])

    for param in ('Q', 'R'):
        ratio = spread('cpf_as_ns10', param) / spread('cpf_as_ns1', param)
        assert 0.7 <= ratio <= 1.4
        assert spread('cpf_bs_ns5', param) <= 0.8 * spread('cpf_bs_ns1', param)


def test_lorenz_cross_validation_scores(tmp_path):
    out = tmp_path / 'table1'
    _run('crossval', out, '--scenario', 'table1', '--repetitions', '10')
    table = pd.read_csv(out / 'table1.csv')
    backward = table[table['algorithm'] == 'cpf_bs'].set_index('iters')
    ancestor = table[table['algorithm'] == 'cpf_as'].set_index('iters')
    assert 0.85 <= backward.loc[100, 'rmse'] <= 1.15
    assert 0.92 <= backward.loc[100, 'cp'] <= 0.98
    assert ancestor.loc[5, 'cp'] < backward.loc[5, 'cp']
    for scores in (backward, ancestor):
        assert scores['cp'].is_monotonic_increasing


@pytest.mark.parametrize("scenario, rmse, cp", [
    ('fig9', [0.6996], [0.86]),
    ('fig12', [2.2478], [0.84]),
    ('fig15', [0.8875, 1.0842, 1.2199], [0.87, 0.84, 0.88]),
])
def test_reconstruction_scores_within_half(tmp_path, scenario, rmse, cp):
    out = tmp_path / scenario
    _run('smooth', out, '--scenario', scenario)
    scores = pd.read_csv(out / 'scores.csv').sort_values('component')
    np.testing.assert_allclose(scores['rmse'], rmse, rtol=0.5)
    np.testing.assert_allclose(scores['cp'], cp, rtol=0.5)

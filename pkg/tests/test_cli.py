"""
命令行端到端测试

所有运行都写入临时目录，使用小规模参数。
"""

import json

import pandas as pd
import pytest

from main import main
from smooth_em.cli import ExperimentController
from smooth_em.cli.csv_io import read_long_frame
from smooth_em.core.exceptions import NumericalError
from smooth_em.utils.constants import CSV_HEADERS, EXIT_CODES


def _run(command, out, tmp_path, *extra):
    argv = [command, '--out', str(out), '--log-file', str(tmp_path / 'logs' / 'run.log'), '--jobs', '1']
    return main(argv + list(extra))


def test_list_scenarios(capsys):
    assert main(['list-scenarios']) == EXIT_CODES['SUCCESS']
    output = capsys.readouterr().out
    assert 'table1' in output
    assert 'crossval' in output


def test_simulate_is_reproducible(tmp_path):
    for name in ('a', 'b'):
        assert _run('simulate', tmp_path / name, tmp_path, '--model', 'kitagawa', '--T', '25') == 0
    for file_name in ('truth.csv', 'obs.csv'):
        first = (tmp_path / 'a' / file_name).read_bytes()
        assert first == (tmp_path / 'b' / file_name).read_bytes()
    truth = read_long_frame(str(tmp_path / 'a' / 'truth.csv'))
    assert truth.shape == (26, 1)
    header = (tmp_path / 'a' / 'obs.csv').read_text(encoding='utf-8').splitlines()[0]
    assert header.split(',') == CSV_HEADERS['OBS']


def test_seed_changes_data(tmp_path):
    _run('simulate', tmp_path / 'a', tmp_path, '--T', '10')
    _run('simulate', tmp_path / 'b', tmp_path, '--T', '10', '--seed', '1')
    assert (tmp_path / 'a' / 'obs.csv').read_bytes() != (tmp_path / 'b' / 'obs.csv').read_bytes()


def _estimate(tmp_path, out):
    config = tmp_path / 'exp.json'
    config.write_text(json.dumps({'mle_iters': 50}), encoding='utf-8')
    return _run('estimate', out, tmp_path, '--config', str(config), '--T', '20', '--iters', '3',
                '--repetitions', '2', '--n-f', '4', '--n-s', '2')


def test_estimate_outputs(tmp_path):
    out = tmp_path / 'est'
    assert _estimate(tmp_path, out) == 0
    trace = pd.read_csv(out / 'cpf_bs' / 'sem_trace_rep2.csv')
    assert list(trace.columns) == ['iter', 'A', 'Q', 'R', 'loglik', 'wall_ms']
    assert list(trace['iter']) == [1, 2, 3]
    final = pd.read_csv(out / 'estimates_final.csv')
    assert list(final['rep']) == [1, 2]
    violin = pd.read_csv(out / 'violin_summary.csv')
    assert set(violin['param']) == {'A', 'Q', 'R', 'loglik'}
    mle = pd.read_csv(out / 'ks_em_mle.csv')
    assert list(mle.columns) == ['A', 'Q', 'R', 'loglik']
    assert (out / 'config_resolved.json').exists()
    assert (out / 'audit.log').exists()

    again = tmp_path / 'est2'
    assert _estimate(tmp_path, again) == 0
    assert (out / 'estimates_final.csv').read_bytes() == (again / 'estimates_final.csv').read_bytes()


def test_budget_exceeded(tmp_path, capsys):
    assert _run('estimate', tmp_path / 'x', tmp_path, '--max-evals', '1') == EXIT_CODES['CONFIG_ERROR']
    assert '预计模型演化次数' in capsys.readouterr().out


def test_unknown_scenario(tmp_path):
    assert _run('smooth', tmp_path / 'x', tmp_path, '--scenario', 'fig99') == EXIT_CODES['CONFIG_ERROR']


def test_invalid_particle_count(tmp_path):
    assert _run('estimate', tmp_path / 'x', tmp_path, '--n-f', '1') == EXIT_CODES['CONFIG_ERROR']


def test_numerical_error_exit_code(tmp_path, monkeypatch):
    def fail(self, command):
        raise NumericalError("测试用数值错误")

    monkeypatch.setattr(ExperimentController, 'run', fail)
    assert _run('simulate', tmp_path / 'x', tmp_path) == EXIT_CODES['NUMERICAL_ERROR']


def test_fixed_parameter_smoothing(tmp_path):
    out = tmp_path / 'fig5'
    assert _run('smooth', out, tmp_path, '--scenario', 'fig5', '--T', '10', '--iters', '2',
                '--n-f', '4', '--n-s', '3') == 0
    for name in ('cpf', 'cpf_as', 'cpf_bs'):
        degeneracy = pd.read_csv(out / f'degeneracy_{name}.csv')
        assert list(degeneracy.columns) == CSV_HEADERS['DEGENERACY']
        assert len(degeneracy) == 2 * 11
        assert degeneracy['distinct'].between(1, 3).all()
        assert (out / f'reconstruction_{name}_iter2.csv').exists()
    scores = pd.read_csv(out / 'scores.csv')
    assert list(scores['arm']) == ['cpf', 'cpf_as', 'cpf_bs']
    assert (out / 'truth.csv').exists()


def test_sem_reconstruction(tmp_path):
    out = tmp_path / 'fig9'
    assert _run('smooth', out, tmp_path, '--scenario', 'fig9', '--T', '15', '--iters', '2',
                '--n-f', '4', '--n-s', '3') == 0
    reconstruction = pd.read_csv(out / 'reconstruction.csv')
    assert list(reconstruction.columns) == CSV_HEADERS['RECONSTRUCTION']
    assert len(reconstruction) == 15
    assert (reconstruction['lo'] <= reconstruction['hi']).all()
    scores = pd.read_csv(out / 'scores.csv')
    assert scores['cp'].between(0, 1).all()
    assert len(pd.read_csv(out / 'sem_trace.csv')) == 2


def test_crossval(tmp_path):
    config = tmp_path / 'cv.yaml'
    config.write_text("test_T: 30\n", encoding='utf-8')
    out = tmp_path / 'table1'
    assert _run('crossval', out, tmp_path, '--scenario', 'table1', '--config', str(config),
                '--T', '20', '--iters', '2', '--repetitions', '1', '--n-f', '6', '--n-s', '2',
                '--eval-iters', '1,2') == 0
    table = pd.read_csv(out / 'table1.csv')
    assert list(table.columns) == CSV_HEADERS['TABLE1']
    assert list(table['algorithm']) == ['cpf_bs', 'cpf_bs', 'cpf_as', 'cpf_as']
    assert list(table['iters']) == [1, 2, 1, 2]
    assert table['cp'].between(0, 1).all()
    train = pd.read_csv(out / 'estimates_train.csv')
    assert list(train.columns) == ['arm', 'sigma_q2', 'sigma_r2']


@pytest.mark.slow
def test_enks_arm_runs(tmp_path):
    out = tmp_path / 'fig14'
    assert _run('estimate', out, tmp_path, '--scenario', 'fig14', '--T', '20', '--iters', '2',
                '--repetitions', '1') == 0
    final = pd.read_csv(out / 'estimates_final.csv')
    assert len(final) == 9


def test_zero_eval_iteration_is_config_error(tmp_path):
    assert _run('crossval', tmp_path / 'x', tmp_path, '--scenario', 'table1',
                '--eval-iters', '0') == EXIT_CODES['CONFIG_ERROR']


def test_empty_eval_iterations_is_config_error(tmp_path):
    config = tmp_path / 'cv.json'
    config.write_text(json.dumps({'eval_iters': []}), encoding='utf-8')
    assert _run('crossval', tmp_path / 'x', tmp_path, '--scenario', 'table1',
                '--config', str(config)) == EXIT_CODES['CONFIG_ERROR']


def test_zero_mle_iterations_is_config_error(tmp_path):
    config = tmp_path / 'exp.json'
    config.write_text(json.dumps({'mle_iters': 0}), encoding='utf-8')
    assert _run('estimate', tmp_path / 'x', tmp_path, '--config', str(config),
                '--T', '10', '--iters', '1', '--repetitions', '1') == EXIT_CODES['CONFIG_ERROR']

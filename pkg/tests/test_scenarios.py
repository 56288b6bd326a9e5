"""
场景注册表测试
"""

import pytest

from smooth_em.cli.commands import COMMANDS
from smooth_em.cli.scenarios import SCENARIOS, get_scenario, list_scenarios, scenario_command
from smooth_em.core.exceptions import InvalidConfig
from smooth_em.utils.config import ConfigManager
from smooth_em.utils.constants import ALGORITHMS


def test_registry_size():
    assert len(list_scenarios()) == 16
    assert [row[0] for row in list_scenarios()][-1] == 'table1'


@pytest.mark.parametrize("name", list(SCENARIOS))
def test_every_scenario_resolves(name):
    assert scenario_command(name) in COMMANDS
    manager = ConfigManager(scenario=get_scenario(name))
    for arm in manager.get_arms():
        assert arm['algorithm'] in ALGORITHMS.values()
        assert arm['n_f'] >= 2


def test_display_fields_are_stripped():
    entry = get_scenario('fig5')
    assert 'anchor' not in entry
    assert 'command' not in entry
    assert entry['mode'] == 'fixed'


def test_unknown_scenario():
    with pytest.raises(InvalidConfig):
        get_scenario('fig99')


def test_particle_count_sweep():
    arms = get_scenario('fig8')['arms']
    assert len(arms) == 9
    assert {arm['n_f'] for arm in arms} == {10, 100, 1000}
    assert len({arm['name'] for arm in arms}) == 9


def test_step_size_sweep_carries_dt():
    arms = get_scenario('fig14')['arms']
    assert sorted({arm['dt'] for arm in arms}) == [0.01, 0.08, 0.15]
    assert sum(arm['algorithm'] == 'enks' for arm in arms) == 3

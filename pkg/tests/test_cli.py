import json
import os

import pytest

from crowd_contagion.cli import cli_main
from crowd_contagion.errors import CrowdContagionError, ScenarioError, SimulationError, TimeStepError
from crowd_contagion.scenario import save_scenario, load_scenario


@pytest.fixture
def scenario_file(make_scenario, tmp_path):
    path = str(tmp_path / 'small.yaml')
    save_scenario(make_scenario(t_end=0.02), path)
    return path


def test_bad_arguments():
    assert cli_main(['run']) == 2
    assert cli_main(['run', 'corridor_uni', '--warp', '9']) == 2
    assert cli_main(['run', 'corridor_uni', '--contact-time', 'maybe']) == 2


def test_unknown_scenario(tmp_path, capsys):
    assert cli_main(['run', 'no_such_corridor', '--out', str(tmp_path / 'x')]) == 1
    assert 'ScenarioError' in capsys.readouterr().err


def test_run_with_overrides(scenario_file, tmp_path, capsys):
    out = str(tmp_path / 'off')
    assert cli_main(['run', scenario_file, '--contact-time', 'off', '--t-end', '0.01', '--out', out]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary['steps'] == 10
    resolved = load_scenario(os.path.join(out, 'scenario.yaml'))
    assert not resolved.params.contact_time_enabled
    assert resolved.params.t_end == 0.01


def test_compare(scenario_file, tmp_path, capsys):
    a, b = str(tmp_path / 'a'), str(tmp_path / 'b')
    assert cli_main(['run', scenario_file, '--out', a]) == 0
    assert cli_main(['run', scenario_file, '--out', b, '--eikonal-method', 'sweeping']) == 0
    capsys.readouterr()
    table = str(tmp_path / 'compare.csv')
    assert cli_main(['compare', a, b, '--out', table]) == 0
    assert 'ratio' in capsys.readouterr().out
    assert os.path.exists(table)
    assert cli_main(['compare', a, str(tmp_path / 'nowhere')]) == 1


def test_unwritable_run_directory(scenario_file, tmp_path, capsys):
    blocker = tmp_path / 'blocker'
    blocker.write_text('not a folder')
    assert cli_main(['run', scenario_file, '--out', str(blocker / 'run')]) == 1
    assert 'NotADirectoryError' in capsys.readouterr().err


def test_package_errors_share_a_base():
    for error in (ScenarioError, SimulationError, TimeStepError):
        assert issubclass(error, CrowdContagionError)

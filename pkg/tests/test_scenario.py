import os

import numpy as np
import pytest

from crowd_contagion.errors import ScenarioError
from crowd_contagion.scenario import (load_scenario, load_preset, preset_names, save_scenario, apply_overrides,
                                      seed_particles, seed_cloud, lattice_points, Population, SubBlock, Domain,
                                      ExitRegion, Scenario, ModelParams)

MINIMAL = """
name: minimal
domain:
  width: 100
  height: 50
  exits:
    - {id: right, side: right, interval: [0, 50]}
populations:
  - id: crowd
    goal: right
    spacing: 1.575
    block: [2, 5, 40, 45]
"""


def write(tmp_path, text, name='scenario.yaml'):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_load_minimal_file_uses_defaults(tmp_path):
    scenario = load_scenario(write(tmp_path, MINIMAL))
    assert scenario.domain.width == 100
    assert scenario.domain.height == 50
    assert scenario.params.V_max == 2.
    assert scenario.params.dt == 0.001
    assert scenario.params.i_o == 0.04
    assert scenario.output.frame_interval == 0.5
    # corridor walls top and bottom by default
    assert len(scenario.domain.wall_segments) == 2


def test_missing_required_parameter_is_named(tmp_path):
    text = MINIMAL + 'params:\n  use_defaults: false\n'
    with pytest.raises(ScenarioError) as info:
        load_scenario(write(tmp_path, text))
    assert info.value.field == 'params.V_max'
    assert 'V_max' in str(info.value)


def test_zero_spacing_is_rejected(tmp_path):
    with pytest.raises(ScenarioError) as info:
        load_scenario(write(tmp_path, MINIMAL.replace('spacing: 1.575', 'spacing: 0')))
    assert 'spacing' in info.value.field


def test_yaml_error_reports_line(tmp_path):
    with pytest.raises(ScenarioError) as info:
        load_scenario(write(tmp_path, MINIMAL + 'params: [unclosed\n'))
    assert info.value.line is not None


@pytest.mark.parametrize('patch, field', [
    (('goal: right', 'goal: nowhere'), 'populations[0].goal'),
    (('block: [2, 5, 40, 45]', 'block: [2, 5, 140, 45]'), 'populations[0].block'),
    (('width: 100', 'width: -1'), 'domain.width'),
])
def test_invariant_violations(tmp_path, patch, field):
    with pytest.raises(ScenarioError) as info:
        load_scenario(write(tmp_path, MINIMAL.replace(*patch)))
    assert info.value.field == field


def test_negative_parameter_is_rejected(tmp_path):
    with pytest.raises(ScenarioError) as info:
        load_scenario(write(tmp_path, MINIMAL + 'params:\n  nu: -0.1\n'))
    assert info.value.field == 'params.nu'


@pytest.mark.parametrize('name, value', [('k_eik', 2.7), ('stencil_order', 1.5), ('k_eik', 'ten')])
def test_non_integral_count_is_rejected(tmp_path, name, value):
    with pytest.raises(ScenarioError) as info:
        load_scenario(write(tmp_path, MINIMAL + f'params:\n  {name}: {value}\n'))
    assert info.value.field == f'params.{name}'


def test_integral_float_count_is_accepted(tmp_path):
    scenario = load_scenario(write(tmp_path, MINIMAL + 'params:\n  k_eik: 4.0\n'))
    assert scenario.params.k_eik == 4
    assert isinstance(scenario.params.k_eik, int)


def test_exit_overlapping_wall_is_rejected():
    domain = Domain.corridor(100., 50., [ExitRegion('floor', 'bottom', (10., 20.))])
    with pytest.raises(ScenarioError):
        domain.validate()


def test_presets_load():
    assert set(preset_names()) >= {'corridor_uni', 'corridor_bi', 'corridor_uni_obstacle', 'corridor_bi_obstacle',
                                   'corridor_moving_obstacle'}
    for name in preset_names():
        scenario = load_preset(name)
        assert scenario.name == name
        assert scenario.domain.width == 100 and scenario.domain.height == 50
    assert load_preset('corridor_moving_obstacle').obstacles[0].moving
    with pytest.raises(ScenarioError):
        load_preset('no_such_corridor')


def test_vehicle_drives_against_the_crowd():
    scenario = load_preset('corridor_moving_obstacle')
    vehicle = scenario.obstacles[0]
    crowd = scenario.populations[0]
    assert vehicle.goal_id == 'left'
    assert crowd.goal_id == 'right'
    assert vehicle.bounds[0] > crowd.seeding_block[2]
    assert vehicle.bounds[1] < crowd.seeding_block[3] and vehicle.bounds[3] > crowd.seeding_block[1]


def test_saved_scenario_reloads_identically(tmp_path):
    scenario = load_preset('corridor_bi_obstacle')
    path = str(tmp_path / 'resolved.yaml')
    save_scenario(scenario, path)
    again = load_scenario(path)
    assert again.to_dict() == scenario.to_dict()
    a, b = seed_cloud(scenario), seed_cloud(again)
    np.testing.assert_array_equal(a.x, b.x)
    np.testing.assert_array_equal(a.alpha, b.alpha)


def test_overrides():
    scenario = load_preset('corridor_moving_obstacle')
    changed = apply_overrides(scenario, dt=0.002, contact_time_enabled=False, V_max_obs=2.5, t_end=None)
    assert changed.params.dt == 0.002
    assert not changed.params.contact_time_enabled
    assert changed.params.t_end == scenario.params.t_end
    assert changed.obstacles[0].V_max_obs == 2.5
    # the original is untouched
    assert scenario.params.dt == 0.001
    with pytest.raises(ScenarioError):
        apply_overrides(scenario, dt=-1.)
    with pytest.raises(ScenarioError):
        apply_overrides(scenario, warp_speed=9)


def test_model_params_derived_values():
    params = ModelParams()
    assert params.h_U == 10.
    assert params.pen_strength == params.C_r
    assert params.n_steps == 40000


# ------------------------------------------------------------------------------------------------------------------

def _scenario(population: Population) -> Scenario:
    domain = Domain.corridor(100., 50., [ExitRegion('right', 'right', (0., 50.))])
    return Scenario(name='seed', domain=domain, populations=[population])


def test_seed_density_and_mass():
    scenario = _scenario(Population(id='p', goal_id='right', seeding_block=(2., 5., 40., 45.), spacing=1.575))
    states = seed_particles(scenario)
    rho = np.array([s.rho for s in states])
    assert rho[0] == pytest.approx(0.4031, abs=1e-4)
    assert np.all(rho == 1 / 1.575 ** 2)
    np.testing.assert_allclose([s.m for s in states], 1.)
    assert all(np.all(s.u == 0) for s in states)
    total = sum(s.m for s in states)
    assert total == pytest.approx(len(states) * rho[0] * 1.575 ** 2, rel=1e-12)


def test_lattice_count():
    assert len(lattice_points((0., 0., 10., 10.), 1.)) == 100
    scenario = _scenario(Population(id='p', goal_id='right', seeding_block=(10., 10., 20., 20.), spacing=1.))
    assert len(seed_particles(scenario)) == 100


def test_cells_crossing_the_block_are_omitted():
    points = lattice_points((2., 5., 40., 45.), 1.575)
    # floor(38 / 1.575) = 24, floor(40 / 1.575) = 25
    assert len(points) == 24 * 25
    assert points[:, 0].max() + 1.575 / 2 <= 40.
    assert points[:, 1].max() + 1.575 / 2 <= 45.


def test_infected_block():
    population = Population(id='p', goal_id='right', seeding_block=(10., 10., 20., 20.), spacing=1.,
                            initial_fractions=(0., 0., 1.))
    for state in seed_particles(_scenario(population)):
        np.testing.assert_array_equal(state.alpha, [0., 0., 1.])


def test_sub_block_fractions_sum_to_one():
    population = Population(id='p', goal_id='right', seeding_block=(10., 10., 20., 20.), spacing=1.,
                            sub_blocks=[SubBlock(block=(12., 12., 14., 14.), fractions=(0., 0., 1.))])
    states = seed_particles(_scenario(population))
    infected = [s for s in states if s.alpha[2] == 1]
    assert len(infected) == 4  # centres 12.5 and 13.5 in both directions
    for state in states:
        assert state.alpha.sum() == 1.


def test_empty_block_raises():
    population = Population(id='p', goal_id='right', seeding_block=(10., 10., 10.5, 20.), spacing=1.)
    with pytest.raises(ScenarioError):
        seed_particles(_scenario(population))


def test_seed_cloud_ids_and_populations():
    cloud = seed_cloud(load_preset('corridor_bi'))
    assert cloud.pop_ids == ['right_walkers', 'left_walkers']
    np.testing.assert_array_equal(cloud.ids, np.arange(cloud.n))
    assert set(np.unique(cloud.pop)) == {0, 1}
    assert cloud.initial_mass == pytest.approx(cloud.m.sum())
    # infected particles are not counted among the seeded susceptibles
    assert cloud.seeded_susceptible.sum() == (cloud.alpha[:, 2] < 0.5).sum()
    assert os.path.basename(load_preset('corridor_bi').output.directory) == 'corridor_bi'

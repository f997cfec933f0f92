import json
import os

import numpy as np
import pandas as pd
import pytest

from crowd_contagion.contagion import infection_rates, step_fractions
from crowd_contagion.errors import SimulationError
from crowd_contagion.io_ops import list_frames, read_frame
from crowd_contagion.obstacle import Obstacle
from crowd_contagion.pointcloud import build_neighbors, update_volumes
from crowd_contagion.scenario import Population, load_preset, apply_overrides
from crowd_contagion.sim import Simulator, run


def test_advance_writes_nothing(small, tmp_path):
    directory = str(tmp_path / 'run')
    sim = Simulator(small, directory=directory)
    state = sim.advance()
    assert state.step == 1
    assert state.t == pytest.approx(0.001)
    assert not os.path.exists(directory)
    # the first step solved the walkers' field
    assert 'right' in state.fields
    assert state.diagnostics.eikonal_solves == 1


def test_invariants_over_a_few_steps(small):
    sim = Simulator(small)
    cloud = sim.state.cloud
    for _ in range(15):
        sim.advance()
        alive = cloud.alive_index
        assert (cloud.rho[alive] > 0).all()
        assert (cloud.alpha[alive] >= 0).all()
        assert (cloud.x[alive, 0] >= 0).all() and (cloud.x[alive, 0] <= 30).all()
        assert (cloud.x[alive, 1] >= 0).all() and (cloud.x[alive, 1] <= 20).all()
    diagnostics = sim.state.diagnostics
    assert diagnostics.max_simplex_error < 1e-10
    assert diagnostics.max_mass_error < 1e-12
    assert diagnostics.eikonal_solves == 2
    # walkers start moving toward the right exit
    assert cloud.u[cloud.alive_index, 0].mean() > 0


def test_no_alive_particles(small):
    sim = Simulator(small)
    sim.state.cloud.alive[:] = False
    state = sim.advance()
    assert state.step == 1
    assert state.diagnostics.eikonal_solves == 0


def test_run_directory(small, tmp_path):
    directory = str(tmp_path / 'small')
    summary = run(small, directory)
    assert summary['steps'] == 50
    assert summary['t'] == pytest.approx(0.05)
    assert summary['alive'] + summary['exited'] == 48
    frames = list_frames(directory)
    assert len(frames) == 6
    assert read_frame(frames[-1]).t == pytest.approx(0.05)
    for name in ('scenario.yaml', 'summary.csv', 'exposure.csv', 'metadata.json', 'run.log'):
        assert os.path.exists(os.path.join(directory, name))
    assert not os.path.exists(os.path.join(directory, 'TRUNCATED'))
    assert not os.path.exists(os.path.join(directory, 'obstacles.csv'))
    with open(os.path.join(directory, 'metadata.json')) as fh:
        metadata = json.load(fh)
    assert metadata['status'] == 'complete'
    assert metadata['diagnostics']['max_simplex_error'] < 1e-10
    exposure = pd.read_csv(os.path.join(directory, 'exposure.csv'))
    assert list(exposure.columns) == ['t', 'percent']
    assert (np.diff(exposure.t) > 0).all()
    assert exposure.percent.between(0, 100).all()
    summary_table = pd.read_csv(os.path.join(directory, 'summary.csv'))
    assert list(summary_table.columns) == ['t', 'exposed_percent', 'alive_count', 'mean_density']


def test_runs_are_deterministic(small, tmp_path):
    run(small, str(tmp_path / 'a'))
    run(small, str(tmp_path / 'b'))
    frames_a = list_frames(str(tmp_path / 'a'))
    frames_b = list_frames(str(tmp_path / 'b'))
    assert len(frames_a) == len(frames_b)
    for a, b in zip(frames_a, frames_b):
        with open(a, 'rb') as fa, open(b, 'rb') as fb:
            assert fa.read() == fb.read()
    for name in ('summary.csv', 'exposure.csv'):
        with open(tmp_path / 'a' / name, 'rb') as fa, open(tmp_path / 'b' / name, 'rb') as fb:
            assert fa.read() == fb.read()


def test_zero_duration_writes_the_initial_frame(make_scenario, tmp_path):
    directory = str(tmp_path / 'still')
    summary = run(make_scenario(t_end=0.), directory)
    assert summary['steps'] == 0
    frames = list_frames(directory)
    assert len(frames) == 1
    frame = read_frame(frames[0])
    assert frame.t == 0.
    assert len(frame) == 48
    assert (frame.table.label == 'infected').sum() == 2


def test_final_frame_off_the_interval(make_scenario, tmp_path):
    directory = str(tmp_path / 'odd')
    run(make_scenario(t_end=0.015), directory)
    frames = list_frames(directory)
    assert [read_frame(path).t for path in frames] == pytest.approx([0., 0.01, 0.015])


def test_failure_truncates_the_run(small, tmp_path, monkeypatch):
    directory = str(tmp_path / 'broken')
    sim = Simulator(small, directory=directory)
    original = sim._phase_contagion

    def failing(state):
        if state.step == 3:
            raise FloatingPointError('boom')
        original(state)

    monkeypatch.setattr(sim, '_phase_contagion', failing)
    with pytest.raises(SimulationError) as info:
        sim.run()
    assert info.value.step == 3
    assert info.value.phase == 'contagion'
    assert os.path.exists(os.path.join(directory, 'TRUNCATED'))
    with open(os.path.join(directory, 'metadata.json')) as fh:
        metadata = json.load(fh)
    assert metadata['status'] == 'truncated'
    assert metadata['error']['phase'] == 'contagion'
    # a clean rerun into the same directory clears the marker
    Simulator(small, directory=directory).run()
    assert not os.path.exists(os.path.join(directory, 'TRUNCATED'))


def test_healthy_crowd_stays_healthy(make_scenario, tmp_path):
    population = Population(id='walkers', goal_id='right', seeding_block=(2., 4., 12., 16.), spacing=1.5)
    summary = run(make_scenario(populations=[population], t_end=0.03), str(tmp_path / 'healthy'))
    assert summary['final_exposed_percent'] == 0.


def test_moving_obstacle_accelerates(make_scenario, tmp_path):
    car = Obstacle(id='car', center=(22., 10.), half_extents=(2., 1.), moving=True, goal_id='right')
    directory = str(tmp_path / 'car')
    run(make_scenario(obstacles=[car], t_end=0.03), directory)
    trajectory = pd.read_csv(os.path.join(directory, 'obstacles.csv'))
    assert list(trajectory.columns) == ['t', 'id', 'x', 'y', 'vx', 'vy', 'active']
    assert trajectory.vx.iloc[0] == 0.
    assert trajectory.vx.iloc[-1] == pytest.approx(3., rel=1e-3)
    assert (np.diff(trajectory.x) >= 0).all()
    summary_table = pd.read_csv(os.path.join(directory, 'summary.csv'))
    assert 'obstacle_vx' in summary_table.columns


def test_moving_obstacle_keeps_its_lane(make_scenario):
    car = Obstacle(id='car', center=(22., 10.), half_extents=(2., 1.), moving=True, goal_id='right')
    sim = Simulator(make_scenario(obstacles=[car]))
    for _ in range(30):
        sim.advance()
        moved = sim.state.obstacles[0]
        assert abs(moved.center[1] - 10.) < 1e-6
    assert moved.center[0] > 22.


def test_no_pedestrian_inside_an_obstacle(make_scenario):
    pillar = Obstacle(id='pillar', center=(25., 10.), half_extents=(1., 1.))
    sim = Simulator(make_scenario(obstacles=[pillar]))
    cloud = sim.state.cloud
    # dropped onto the crowd after seeding: two particles start inside
    sim.state.obstacles[0].center = np.array([7.25, 10.])
    assert sim.state.obstacles[0].contains(cloud.x, strict=True).sum() == 2
    for _ in range(5):
        sim.advance()
        for obstacle in sim.state.active_obstacles:
            assert not obstacle.contains(cloud.x[cloud.alive_index], strict=True).any()


def test_contagion_sees_the_step_start_kinematics(small):
    sim = Simulator(small)
    cloud = sim.state.cloud
    cloud.u[:, 0] = np.linspace(0., 1., cloud.n)
    params = sim.params
    x, u, alpha = cloud.x.copy(), cloud.u.copy(), cloud.alpha.copy()
    table = build_neighbors(x, max(params.h_U, params.h_phi))
    beta = infection_rates(table, x, u, alpha[:, 2], update_volumes(cloud.m, cloud.rho), sim.kernel)
    assert (beta > 0).any()
    expected = step_fractions(alpha, beta, params.nu, params.theta, params.dt)
    sim.advance()
    assert not np.array_equal(cloud.x, x)
    np.testing.assert_allclose(cloud.alpha, expected, rtol=0, atol=1e-15)


class KinematicsFirst(Simulator):
    phase_order = ('neighbors', 'volumes', 'eikonal', 'forces', 'kinematics', 'contagion', 'obstacles', 'removal',
                   'diagnostics')


def test_phase_order_changes_exposure_by_order_dt(small):
    ordered, swapped = Simulator(small), KinematicsFirst(small)
    for _ in range(20):
        ordered.advance()
        swapped.advance()
    a, b = ordered.state.cloud.alpha, swapped.state.cloud.alpha
    assert not np.array_equal(a[:, 1], b[:, 1])
    assert np.abs(a - b).max() < small.params.dt


def test_reused_directory_drops_old_frames(make_scenario, tmp_path):
    directory = str(tmp_path / 'reused')
    car = Obstacle(id='car', center=(22., 10.), half_extents=(2., 1.), moving=True, goal_id='right')
    run(make_scenario(obstacles=[car]), directory)
    assert len(list_frames(directory)) == 6
    run(make_scenario(t_end=0.02), directory)
    frames = list_frames(directory)
    assert [read_frame(path).t for path in frames] == pytest.approx([0., 0.01, 0.02])
    assert not os.path.exists(os.path.join(directory, 'obstacles.csv'))
    exposure = pd.read_csv(os.path.join(directory, 'exposure.csv'))
    assert len(exposure) == 3


def test_eikonal_dump(make_scenario, tmp_path):
    scenario = make_scenario(t_end=0.02)
    scenario.output.dump_eikonal = True
    directory = str(tmp_path / 'dump')
    run(scenario, directory)
    # no field is solved before the first step
    assert not os.path.exists(os.path.join(directory, 'eikonal', 'eikonal_right_00000.csv'))
    table = pd.read_csv(os.path.join(directory, 'eikonal', 'eikonal_right_00001.csv'))
    assert list(table.columns) == ['x', 'y', 'kind', 'phi', 'dx', 'dy']
    assert set(table.kind) == {'free', 'goal', 'wall'}
    assert (table.phi[table.kind == 'goal'] == 0).all()
    assert (table.phi[table.kind == 'free'] > 0).all()


# ---------- full-length corridor runs -----------------------------------------------------------------------------

def _exposure(scenario, directory):
    run(scenario, directory)
    return pd.read_csv(os.path.join(directory, 'exposure.csv'))


@pytest.mark.slow
def test_uni_directional_flow_stays_unexposed(tmp_path):
    exposure = _exposure(load_preset('corridor_uni'), str(tmp_path / 'uni'))
    assert (exposure.percent == 0).all()


@pytest.mark.slow
def test_contact_time_reduces_exposure(tmp_path):
    scenario = load_preset('corridor_bi')
    on = _exposure(scenario, str(tmp_path / 'on'))
    off = _exposure(apply_overrides(scenario, contact_time_enabled=False), str(tmp_path / 'off'))
    assert (on.percent.values <= off.percent.values).all()
    assert on.percent.iloc[-1] <= 0.5 * off.percent.iloc[-1]


@pytest.mark.slow
def test_fixed_obstacle_raises_exposure(tmp_path):
    exposure = _exposure(load_preset('corridor_uni_obstacle'), str(tmp_path / 'obstacle'))
    assert exposure.percent.iloc[-1] > 0


@pytest.mark.slow
def test_vehicle_slows_down_in_the_crowd(tmp_path):
    directory = str(tmp_path / 'vehicle')
    scenario = load_preset('corridor_moving_obstacle')
    run(scenario, directory)
    trajectory = pd.read_csv(os.path.join(directory, 'obstacles.csv'))
    trajectory = trajectory.loc[trajectory.active == 1]
    t = trajectory.t.values
    speed = -trajectory.vx.values  # driving to the left exit
    top = scenario.obstacles[0].V_max_obs
    # full speed before meeting the crowd
    cruising = int(np.argmax(speed >= 0.9 * top))
    assert speed[cruising] >= 0.9 * top
    assert t[cruising] < 5.
    slowest = cruising + int(np.argmin(speed[cruising:]))
    assert speed[slowest] <= 0.8 * top
    assert 10. <= t[slowest] <= 26.
    # and back to full speed once through
    assert speed[slowest:].max() >= 0.9 * top

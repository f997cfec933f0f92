import os

import numpy as np
import pandas as pd
import pytest

from crowd_contagion.io_ops import (FrameRecord, write_frame, read_frame, frame_path, list_frames, compare_runs,
                                    read_exposure, density_map, obstacle_speed_profile, emit_plots, round_significant)
from crowd_contagion.io_ops.frames import FRAME_COLUMNS
from crowd_contagion.pedestrians import ParticleState, ParticleCloud
from crowd_contagion.sim import run


def make_cloud(rng, n=30):
    states = [ParticleState(x=rng.uniform(0, 10, 2), u=rng.normal(size=2), rho=rng.uniform(0.2, 2.),
                            m=1., alpha=rng.dirichlet([1, 1, 1]), pop='a' if k % 2 else 'b', id=k)
              for k in range(n)]
    return ParticleCloud.from_states(states)


def write_exposure(directory, t, percent):
    os.makedirs(directory, exist_ok=True)
    pd.DataFrame({'t': t, 'percent': percent}).to_csv(os.path.join(directory, 'exposure.csv'), index=False)
    return str(directory)


# ---------- frames ------------------------------------------------------------------------------------------------

def test_round_significant():
    assert round_significant(np.array([1 / 3]))[0] == float('%.12g' % (1 / 3))
    assert round_significant(0.05) == 0.05


def test_frame_reads_back_exactly(rng, tmp_path):
    cloud = make_cloud(rng)
    cloud.remove(np.array([3, 4]))
    record = FrameRecord.from_cloud(cloud, t=1.2345678901234567)
    os.makedirs(tmp_path / 'frames')
    path = frame_path(str(tmp_path), 7)
    assert path.endswith('frame_00007.csv')
    write_frame(record, path)
    again = read_frame(path)
    assert again.t == record.t
    assert list(again.table.columns) == FRAME_COLUMNS
    pd.testing.assert_frame_equal(again.table, record.table, check_dtype=False)
    assert len(again.alive) == 28
    assert list_frames(str(tmp_path)) == [path]


def test_not_a_frame(tmp_path):
    path = str(tmp_path / 'other.csv')
    pd.DataFrame({'a': [1]}).to_csv(path, index=False)
    with pytest.raises(ValueError):
        read_frame(path)
    assert list_frames(str(tmp_path / 'nowhere')) == []


def test_density_map(rng):
    cloud = make_cloud(rng, 4)
    cloud.x[:] = [[1., 1.], [1.5, 1.5], [8., 8.], [8.5, 1.]]
    cloud.rho[:] = [1., 3., 5., 7.]
    cloud.remove(np.array([3]))
    x_edges, y_edges, grid = density_map(FrameRecord.from_cloud(cloud, 0.), (2, 2), 10., 10.)
    np.testing.assert_array_equal(x_edges, [0., 5., 10.])
    np.testing.assert_array_equal(grid, [[2., 0.], [0., 5.]])


# ---------- comparison --------------------------------------------------------------------------------------------

def test_compare_runs(tmp_path):
    a = write_exposure(tmp_path / 'a', [0., 1., 2.], [0., 5., 10.])
    b = write_exposure(tmp_path / 'b', [0., 1., 2.], [0., 0., 20.])
    table = compare_runs(a, b)
    assert table.ratio.tolist() == [1., np.inf, 0.5]
    assert table.a_dominates.tolist() == [False, True, False]
    assert table.b_dominates.tolist() == [False, False, True]
    assert (compare_runs(a, a).ratio == 1.).all()


def test_compare_mismatched_times(tmp_path):
    a = write_exposure(tmp_path / 'a', [0., 1., 2.], [0., 5., 10.])
    b = write_exposure(tmp_path / 'b', [0., 0.5, 1.], [0., 0., 20.])
    with pytest.raises(ValueError):
        compare_runs(a, b)
    with pytest.raises(FileNotFoundError):
        read_exposure(str(tmp_path / 'missing'))


# ---------- plots -------------------------------------------------------------------------------------------------

def test_obstacle_speed_profile():
    trajectory = pd.DataFrame({'t': [0., 0., 1., 1.], 'id': ['pillar', 'car', 'pillar', 'car'],
                               'vx': [0., 0., 0., 2.5]})
    profile = obstacle_speed_profile(trajectory)
    assert profile.vx.tolist() == [0., 2.5]
    assert obstacle_speed_profile(trajectory, 'pillar').vx.tolist() == [0., 0.]


def test_emit_plots(small, tmp_path):
    directory = str(tmp_path / 'small')
    run(small, directory)
    # the short run has no frame near the snapshot times
    with pytest.warns(UserWarning):
        written = emit_plots(directory, other=directory)
    assert len(written) == 1
    assert os.path.basename(written[0]).split('.')[0] == 'exposure'
    assert all(os.path.exists(path) for path in written)
    assert os.path.dirname(written[0]) == os.path.join(directory, 'plots')

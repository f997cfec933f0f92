import numpy as np
import pytest

from crowd_contagion.eikonal import (speed_field, obstacle_speed, solve_eikonal, refresh_policy, background_nodes,
                                     wall_ghosts, exit_ghosts, perimeter_points, segment_points, assemble_nodes,
                                     FREE, GOAL, WALL, OBSTACLE)
from crowd_contagion.scenario import ModelParams

SPACING = 1.575


def corridor_nodes(domain, goal, spacing=SPACING):
    background = background_nodes(domain.width, domain.height, spacing)
    nodes, kinds = assemble_nodes([(background, FREE),
                                   (wall_ghosts(domain, spacing), WALL),
                                   (exit_ghosts(domain, goal, spacing), GOAL)])
    return nodes, kinds, len(background)


def plane_wave(domain, spacing=SPACING, method='fast_marching', speed=2.):
    nodes, kinds, n_free = corridor_nodes(domain, 'right', spacing)
    field = solve_eikonal(nodes, kinds, np.full(len(nodes), speed), 'right', h=2 * spacing, method=method,
                          descent_h=1.5 * spacing, exit_normal=np.array([1., 0.]))
    exact = (domain.width - nodes[:n_free, 0]) / speed
    return field, np.abs(field.phi[:n_free] - exact).max()


# ---------- speed -------------------------------------------------------------------------------------------------

@pytest.mark.parametrize('rho, expected', [(0., 2.), (5., 1.), (10., 0.05), (25., 0.05)])
def test_speed_field(rho, expected):
    assert speed_field(np.array([rho]), ModelParams())[0] == pytest.approx(expected)


def test_obstacle_speed():
    assert obstacle_speed(0., ModelParams()) == 3.
    assert obstacle_speed(5., ModelParams()) == pytest.approx(1.5)


# ---------- boundary nodes ----------------------------------------------------------------------------------------

def test_perimeter_points():
    points = perimeter_points((0., 0., 8., 4.), SPACING)
    assert len(points) == 16
    on_edge = (np.isclose(points[:, 0], 0) | np.isclose(points[:, 0], 8) |
               np.isclose(points[:, 1], 0) | np.isclose(points[:, 1], 4))
    assert on_edge.all()
    np.testing.assert_array_equal(points[0], [0., 0.])


def test_segment_points():
    points = segment_points((0., 0.), (10., 0.), 1.)
    assert len(points) == 10
    np.testing.assert_allclose(points[:, 0], np.arange(10) + 0.5)


def test_background_is_symmetric():
    nodes = background_nodes(100., 50., SPACING)
    assert (np.diff(np.unique(nodes[:, 0])) <= SPACING).all()
    mirrored = np.column_stack([100. - nodes[:, 0], nodes[:, 1]])
    assert np.allclose(np.sort(mirrored, axis=0), np.sort(nodes, axis=0))


def test_assemble_nodes_keeps_order():
    nodes, kinds = assemble_nodes([(np.zeros((2, 2)), FREE), (np.ones((1, 2)), OBSTACLE)])
    assert nodes.shape == (3, 2)
    assert kinds.tolist() == [FREE, FREE, OBSTACLE]


# ---------- solve -------------------------------------------------------------------------------------------------

def test_plane_wave_error_bound(corridor):
    field, error = plane_wave(corridor)
    assert error <= 2 * SPACING / 2.
    assert (field.phi[field.kinds == GOAL] == 0).all()
    assert (field.phi[field.kinds == WALL] == 1000.).all()
    assert (field.phi >= 0).all()
    assert field.n_unreachable == 0


def disc_source(spacing, radius=5., size=40.):
    """Travel cost out of a disc of radius ``radius`` in the middle of a square: |x - c| - radius."""
    center = np.array([size / 2, size / 2])
    background = background_nodes(size, size, spacing)
    background = background[np.linalg.norm(background - center, axis=1) > radius + spacing / 4]
    n_goal = int(np.ceil(2 * np.pi * radius / (spacing / 2)))
    angles = 2 * np.pi * np.arange(n_goal) / n_goal
    rim = center + radius * np.column_stack([np.cos(angles), np.sin(angles)])
    nodes, kinds = assemble_nodes([(background, FREE), (rim, GOAL)])
    field = solve_eikonal(nodes, kinds, np.ones(len(nodes)), 'rim', h=2 * spacing)
    exact = np.linalg.norm(background - center, axis=1) - radius
    return np.abs(field.phi[:len(background)] - exact).mean()


def test_curved_front_error_halves_with_spacing():
    coarse = disc_source(SPACING)
    fine = disc_source(SPACING / 2)
    # the affine update is exact for plane waves only
    assert coarse > 1e-3
    assert 0.3 <= fine / coarse <= 0.7


def test_sweeping_passes_the_same_oracle(corridor):
    field, error = plane_wave(corridor, method='sweeping')
    assert error <= 2 * SPACING / 2.
    marched, _ = plane_wave(corridor)
    free = field.kinds == FREE
    np.testing.assert_allclose(field.phi[free], marched.phi[free], atol=SPACING / 2.)


def test_descent_of_plane_wave(corridor):
    field, _ = plane_wave(corridor)
    rows = field.nodes[field.rows]
    interior = (rows[:, 1] > 4) & (rows[:, 1] < 46) & (rows[:, 0] < 95)
    np.testing.assert_allclose(field.descent[interior], np.tile([1., 0.], (interior.sum(), 1)), atol=1e-6)
    norms = np.linalg.norm(field.descent, axis=1)
    np.testing.assert_allclose(norms, 1., atol=1e-12)
    np.testing.assert_allclose(field.descent_at(np.array([50., 25.])), [1., 0.], atol=1e-6)


def test_descent_never_climbs(corridor):
    field, _ = plane_wave(corridor)
    rows = field.rows
    step = 0.5
    ahead = field.nodes[rows] + step * field.descent
    # nearest node to the point one half metre downhill
    for k in range(0, len(rows), 37):
        target = np.argmin(np.linalg.norm(field.nodes[field.kinds == FREE] - ahead[k], axis=1))
        assert field.phi[field.kinds == FREE][target] <= field.phi[rows[k]] + 1e-9 + SPACING / 2.


def test_slower_crowd_raises_the_cost(corridor):
    nodes, kinds, n_free = corridor_nodes(corridor, 'right')
    params = ModelParams()
    fast = solve_eikonal(nodes, kinds, speed_field(np.zeros(len(nodes)), params), 'right', h=2 * SPACING)
    slow = solve_eikonal(nodes, kinds, speed_field(np.full(len(nodes), 5.), params), 'right', h=2 * SPACING)
    free = kinds == FREE
    np.testing.assert_allclose(slow.phi[free], 2 * fast.phi[free], rtol=1e-9)
    assert (slow.phi[free] >= fast.phi[free]).all()


def test_left_field_mirrors_right_field(corridor):
    background = background_nodes(100., 50., SPACING)
    nx = len(np.unique(np.round(background[:, 0], 9)))
    ny = len(background) // nx
    fields = {}
    for goal in ('left', 'right'):
        nodes, kinds, n_free = corridor_nodes(corridor, goal)
        fields[goal] = solve_eikonal(nodes, kinds, np.full(len(nodes), 2.), goal, h=2 * SPACING).phi[:n_free]
    right = fields['right'].reshape(nx, ny)
    left = fields['left'].reshape(nx, ny)
    np.testing.assert_allclose(left[::-1], right, atol=1e-6)


def test_unreachable_nodes_get_phi_wall(corridor):
    nodes, kinds, n_free = corridor_nodes(corridor, 'right')
    nodes = np.vstack([nodes, [[500., 500.]]])
    kinds = np.append(kinds, FREE)
    field = solve_eikonal(nodes, kinds, np.full(len(nodes), 2.), 'right', h=2 * SPACING, phi_wall=1234.)
    assert field.phi[-1] == 1234.
    assert field.n_unreachable == 1
    np.testing.assert_array_equal(field.descent[-1], [0., 0.])


def test_obstacle_ghosts_are_walked_around(corridor):
    background = background_nodes(100., 50., SPACING)
    inside = (np.abs(background[:, 0] - 60) < 3) & (np.abs(background[:, 1] - 25) < 10)
    ghosts = perimeter_points((57., 15., 63., 35.), SPACING)
    nodes, kinds = assemble_nodes([(background[~inside], FREE),
                                   (wall_ghosts(corridor, SPACING), WALL),
                                   (ghosts, OBSTACLE),
                                   (exit_ghosts(corridor, 'right', SPACING), GOAL)])
    field = solve_eikonal(nodes, kinds, np.full(len(nodes), 2.), 'right', h=2 * SPACING)
    assert (field.phi[kinds == OBSTACLE] == 1000.).all()
    free = kinds == FREE
    shadow = free & (np.abs(nodes[:, 1] - 25) < 2) & (nodes[:, 0] > 50) & (nodes[:, 0] < 56)
    # behind the obstacle the straight path is blocked: the cost exceeds the straight-line value
    assert shadow.any()
    assert (field.phi[shadow] > (100 - nodes[shadow, 0]) / 2 + 1.).all()


def test_no_goal_raises():
    nodes = np.zeros((3, 2))
    with pytest.raises(ValueError):
        solve_eikonal(nodes, np.zeros(3, dtype=np.int8), np.ones(3), 'right', h=1.)


def test_refresh_policy():
    params = ModelParams(k_eik=10)
    assert refresh_policy(0, params)
    assert not any(refresh_policy(step, params) for step in range(1, 10))
    assert refresh_policy(10, params)
    assert refresh_policy(3, params, displacement=2., spacing=SPACING)
    assert not refresh_policy(3, params, displacement=1., spacing=SPACING)

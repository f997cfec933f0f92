__all__ = ['obstacle_force_from_crowd', 'obstacle_density', 'step_obstacle', 'crowd_force_from_obstacle',
           'rectangle_distance']

import warnings
from typing import (Sequence, Tuple)

import numpy as np

from ..eikonal.speed import obstacle_speed
from ..pedestrians.forces import morse_gradient
from ..pedestrians.kinematics import step_velocity
from ._types import Obstacle


def rectangle_distance(obstacle: Obstacle, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Distance from each point to the rectangle (0 inside) and the outward normal of the nearest face.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    q = points - obstacle.center
    hx, hy = obstacle.half_extents
    ex = np.abs(q[:, 0]) - hx
    ey = np.abs(q[:, 1]) - hy
    distance = np.sqrt(np.maximum(ex, 0) ** 2 + np.maximum(ey, 0) ** 2)
    sign_x = np.where(q[:, 0] < 0, -1., 1.)
    sign_y = np.where(q[:, 1] < 0, -1., 1.)
    normal = np.zeros_like(points)
    x_face = ex >= ey
    normal[x_face, 0] = sign_x[x_face]
    normal[~x_face, 1] = sign_y[~x_face]
    return distance, normal


def obstacle_force_from_crowd(obstacle: Obstacle, x: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """
    Crowd push on the vehicle: -sum_j grad U_O(x_O - x_j) rho_j dV_j,
    distances from the centre of mass, particles within ``obstacle.interaction_radius``.
    """
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    if len(x) == 0:
        return np.zeros(2)
    r = obstacle.center - x
    near = np.sqrt(r[:, 0] ** 2 + r[:, 1] ** 2) <= obstacle.interaction_radius
    if not near.any():
        return np.zeros(2)
    grad = morse_gradient(r[near], obstacle.C_r_obs, obstacle.l_r_obs)
    return -(grad * np.asarray(weights, dtype=float)[near][:, None]).sum(axis=0)


def obstacle_density(obstacle: Obstacle, x: np.ndarray, rho: np.ndarray, radius: float) -> float:
    """
    Crowd density at the vehicle: inverse-distance average of ``rho`` over the particles
    within ``radius`` of the rectangle; 0 if there are none.
    """
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    if len(x) == 0:
        return 0.
    distance, _ = rectangle_distance(obstacle, x)
    near = distance <= radius
    if not near.any():
        return 0.
    w = 1. / np.maximum(distance[near], 1e-12)
    return float(np.sum(w * np.asarray(rho)[near]) / np.sum(w))


def step_obstacle(obstacle: Obstacle, descent: np.ndarray, rho: float, F_crowd: np.ndarray, dt: float, params,
                  domain) -> Obstacle:
    """
    Advances a moving obstacle by one step and returns the new state (fixed or removed ones come back unchanged).

    G_O relaxes the velocity toward V_O(rho) * descent with time ``T_obs`` (integrated exactly),
    the crowd force enters explicitly, the position follows by Euler.
    The rectangle is kept inside the domain except across its goal exit,
    and is deactivated once its trailing edge has crossed it.
    """
    moved = obstacle.copy()
    if not obstacle.moving or not obstacle.active:
        return moved
    v_des = obstacle_speed(rho, params) * np.asarray(descent, dtype=float)
    moved.velocity = step_velocity(obstacle.velocity, v_des, np.asarray(F_crowd, dtype=float), np.zeros(2), dt,
                                   obstacle.T_obs)
    moved.center = obstacle.center + moved.velocity * dt
    goal = domain.get_exit(obstacle.goal_id)
    limits = ((0., domain.width), (0., domain.height))
    for axis in (0, 1):
        half = moved.half_extents[axis]
        low, high = limits[axis]
        open_low = goal.axis == axis and goal.side in ('left', 'bottom')
        open_high = goal.axis == axis and goal.side in ('right', 'top')
        if not open_low and moved.center[axis] - half < low:
            moved.center[axis] = low + half
            moved.velocity[axis] = 0.
        if not open_high and moved.center[axis] + half > high:
            moved.center[axis] = high - half
            moved.velocity[axis] = 0.
    x0, y0, x1, y1 = moved.bounds
    trailing = {'left': x1 < 0, 'right': x0 > domain.width, 'bottom': y1 < 0, 'top': y0 > domain.height}
    if trailing[goal.side]:
        moved.active = False
    bound = obstacle.V_max_obs + np.linalg.norm(F_crowd) * max(dt, obstacle.T_obs)
    if np.linalg.norm(moved.velocity) > bound + 1e-9:
        warnings.warn(f'Obstacle {obstacle.id} speed {np.linalg.norm(moved.velocity):.3f} m/s above {bound:.3f}')
    return moved


def crowd_force_from_obstacle(x: np.ndarray, obstacles: Sequence[Obstacle], C_pen: float,
                              l_pen: float) -> np.ndarray:
    """
    Short-range push keeping pedestrians out of the obstacles: C_pen exp(-d / l_pen) along the nearest-face normal,
    with d the distance to the rectangle (0 inside) and nothing beyond 3 l_pen.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    force = np.zeros_like(x)
    for obstacle in obstacles:
        if not obstacle.active:
            continue
        distance, normal = rectangle_distance(obstacle, x)
        near = distance <= 3 * l_pen
        force[near] += (C_pen * np.exp(-distance[near] / l_pen))[:, None] * normal[near]
    return force

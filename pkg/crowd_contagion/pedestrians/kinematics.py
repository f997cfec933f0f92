__all__ = ['desired_velocity', 'step_velocity', 'step_density', 'step_position', 'project_out_of_obstacles']

from typing import (Sequence, Tuple)

import numpy as np

from ..eikonal.speed import speed_field


def desired_velocity(descent: np.ndarray, rho: np.ndarray, params) -> np.ndarray:
    """v_des = V(rho) * descent; a zero descent gives a zero desired velocity."""
    descent = np.asarray(descent, dtype=float)
    return speed_field(rho, params)[..., None] * descent


def step_velocity(u: np.ndarray, v_des: np.ndarray, F_morse: np.ndarray, F_obs: np.ndarray, dt: float,
                  T: float) -> np.ndarray:
    """
    Relaxation toward ``v_des`` integrated exactly, forces explicitly:
    u' = v_des + (u - v_des) exp(-dt / T) + (F_morse + F_obs) dt
    """
    u = np.asarray(u, dtype=float)
    v_des = np.asarray(v_des, dtype=float)
    return v_des + (u - v_des) * np.exp(-dt / T) + (np.asarray(F_morse) + np.asarray(F_obs)) * dt


def step_density(rho: np.ndarray, div_u: np.ndarray, dt: float) -> np.ndarray:
    """rho' = rho exp(-div u dt): the continuity equation along the path, positive by construction."""
    return np.asarray(rho, dtype=float) * np.exp(-np.asarray(div_u, dtype=float) * dt)


def project_out_of_obstacles(x: np.ndarray, u: np.ndarray, obstacles: Sequence) -> Tuple[np.ndarray, np.ndarray]:
    """
    Particles strictly inside an obstacle go to the nearest face;
    their velocity component along that face normal takes the obstacle's.
    """
    for obstacle in obstacles:
        if not obstacle.active:
            continue
        inside = np.flatnonzero(obstacle.contains(x, strict=True))
        if len(inside) == 0:
            continue
        x0, y0, x1, y1 = obstacle.bounds
        gaps = np.column_stack([x[inside, 0] - x0, x1 - x[inside, 0], x[inside, 1] - y0, y1 - x[inside, 1]])
        face = np.argmin(gaps, axis=1)
        targets = np.array([x0, x1, y0, y1])
        axis = face // 2
        x[inside, axis] = targets[face]
        u[inside, axis] = obstacle.velocity[axis]
    return x, u


def step_position(x: np.ndarray, u: np.ndarray, dt: float, domain, exits: Sequence, pop: np.ndarray,
                  obstacles: Sequence = ()) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    x' = x + u dt, then the boundary rules:

    * crossing the domain edge inside the particle's own exit region: the particle has exited
    * crossing a wall segment or any other part of the domain edge: put back on the wall,
      velocity component along the wall normal zeroed
    * ending inside an obstacle: ``project_out_of_obstacles``

    :param exits: exit region of each population
    :param pop: population index of each particle
    :return: new positions, new velocities, mask of exited particles
    """
    x = np.asarray(x, dtype=float)
    u = np.array(u, dtype=float)
    new = x + u * dt
    n = len(new)
    exited = np.zeros(n, dtype=bool)
    for k, region in enumerate(exits):
        mine = pop == k
        axis = region.axis
        along = new[:, 1 - axis]
        if region.side in ('left', 'bottom'):
            beyond = new[:, axis] < 0
        else:
            limit = domain.width if axis == 0 else domain.height
            beyond = new[:, axis] > limit
        exited |= mine & beyond & region.covers(along)
    stay = ~exited
    for (ax, ay), (bx, by) in domain.wall_segments:
        if ay == by:
            axis, level, lo, hi = 1, ay, min(ax, bx), max(ax, bx)
        else:
            axis, level, lo, hi = 0, ax, min(ay, by), max(ay, by)
        along = new[:, 1 - axis]
        before = x[:, axis] - level
        after = new[:, axis] - level
        crossed = stay & (before * after < 0) & (along >= lo) & (along <= hi)
        new[crossed, axis] = level
        u[crossed, axis] = 0.
    for axis, limit in ((0, domain.width), (1, domain.height)):
        low = stay & (new[:, axis] < 0)
        high = stay & (new[:, axis] > limit)
        new[low, axis] = 0.
        new[high, axis] = limit
        u[low | high, axis] = 0.
    active = [o for o in obstacles if o.active]
    if active:
        inner = np.flatnonzero(stay)
        moved_x, moved_u = project_out_of_obstacles(new[inner], u[inner], active)
        new[inner] = moved_x
        u[inner] = moved_u
    return new, u, exited

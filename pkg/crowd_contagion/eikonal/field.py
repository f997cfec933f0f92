__all__ = ['EikonalField', 'solve_eikonal', 'refresh_policy']

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..pointcloud.neighbors import build_neighbors
from ..pointcloud.stencil import build_stencils, gradient, gradient_at
from ._marching import march, sweep, FAR, KNOWN, BLOCKED
from .boundary import FREE, GOAL, WALL, OBSTACLE

log = logging.getLogger(__name__)


@dataclass
class EikonalField:
    """
    Travel cost ``phi`` toward one goal on a node cloud, and the unit descent direction at the ``rows`` nodes
    (for pedestrian fields the particles, which come first in ``nodes``).

    * ``phi`` is 0 on goal nodes and ``phi_wall`` on wall and obstacle nodes
    * ``descent`` is ``-grad phi / |grad phi|``, the exit normal where the gradient vanishes,
      and zero where no goal could be reached
    * ``stamp`` is the simulated time of the solve
    """
    goal_id: str
    nodes: np.ndarray
    kinds: np.ndarray
    phi: np.ndarray
    rows: np.ndarray
    descent: np.ndarray
    unreachable: np.ndarray
    h: float
    stamp: float = 0.
    step: int = 0

    @property
    def row_phi(self) -> np.ndarray:
        return self.phi[self.rows]

    @property
    def n_unreachable(self) -> int:
        return int(self.unreachable.sum())

    def descent_at(self, point: np.ndarray, exit_normal: Optional[np.ndarray] = None, eps_grad: float = 1e-8):
        """
        Descent direction at an arbitrary point (a moving obstacle's centre),
        fitted from the solved, non-blocked nodes around it.
        """
        usable = (self.kinds == FREE) | (self.kinds == GOAL)
        usable &= ~self.unreachable
        g = gradient_at(point, self.nodes[usable], self.phi[usable], self.h)
        norm = np.linalg.norm(g)
        if norm > eps_grad:
            return -g / norm
        return np.zeros(2) if exit_normal is None else np.asarray(exit_normal, dtype=float)


def solve_eikonal(nodes: np.ndarray, kinds: np.ndarray, speed: np.ndarray, goal_id: str, h: float,
                  phi_wall: float = 1000., method: str = 'fast_marching', rows: Optional[np.ndarray] = None,
                  exit_normal: Optional[np.ndarray] = None, eps_grad: float = 1e-8,
                  descent_h: Optional[float] = None, stencil_order: int = 1,
                  stamp: float = 0., step: int = 0) -> EikonalField:
    """
    Solves ``V |grad phi| = 1`` on the node cloud.

    :param nodes: (n, 2) node positions
    :param kinds: ``FREE``, ``GOAL``, ``WALL`` or ``OBSTACLE`` per node
    :param speed: V per node (only free nodes are read)
    :param h: neighbour radius of the solve
    :param method: ``fast_marching`` or ``sweeping``
    :param rows: nodes where the descent is wanted (default: every free node)
    :param exit_normal: descent where the gradient vanishes (goal side)
    :param descent_h: stencil radius of the descent gradient (default ``h``)
    """
    nodes = np.asarray(nodes, dtype=float).reshape(-1, 2)
    kinds = np.asarray(kinds)
    if not (kinds == GOAL).any():
        raise ValueError(f'No goal node for {goal_id}')
    table = build_neighbors(nodes, h)
    phi = np.full(len(nodes), np.inf)
    status = np.full(len(nodes), FAR, dtype=np.int64)
    goal = kinds == GOAL
    blocked = (kinds == WALL) | (kinds == OBSTACLE)
    phi[goal] = 0.
    status[goal] = KNOWN
    status[blocked] = BLOCKED
    slowness = 1. / np.maximum(np.asarray(speed, dtype=float), 1e-12)
    if method == 'fast_marching':
        phi = march(table.indptr, table.j, nodes, slowness, phi, status, h)
    elif method == 'sweeping':
        phi, iterations = sweep(table.indptr, table.j, nodes, slowness, phi, status, h)
        log.debug(f'{goal_id}: sweeping converged in {iterations} iterations')
    else:
        raise ValueError(f'Unknown eikonal method {method}')
    unreachable = ~np.isfinite(phi) & ~blocked
    if unreachable.any():
        log.warning(f'{goal_id}: {int(unreachable.sum())} node(s) cannot reach the goal, set to phi_wall')
    phi[unreachable | blocked] = phi_wall
    if rows is None:
        rows = np.flatnonzero(kinds == FREE)
    rows = np.asarray(rows, dtype=np.int64)
    descent_h = h if descent_h is None else descent_h
    descent = np.zeros((len(rows), 2))
    if len(rows):
        stencils = build_stencils(nodes, descent_h, rows=rows, table=table if descent_h <= h else None,
                                  order=stencil_order)
        grad = gradient(phi, stencils)
        norm = np.linalg.norm(grad, axis=1)
        steep = norm > eps_grad
        descent[steep] = -grad[steep] / norm[steep, None]
        if exit_normal is not None:
            descent[~steep] = exit_normal
        descent[unreachable[rows]] = 0.
    return EikonalField(goal_id=goal_id, nodes=nodes, kinds=kinds, phi=phi, rows=rows, descent=descent,
                        unreachable=unreachable, h=h, stamp=stamp, step=step)


def refresh_policy(step: int, params, displacement: float = 0., spacing: float = np.inf) -> bool:
    """
    Whether the eikonal fields are due: every ``k_eik`` steps (step 0 included)
    and whenever an obstacle moved more than one spacing since the last solve.
    """
    if step % int(params.k_eik) == 0:
        return True
    return displacement > spacing

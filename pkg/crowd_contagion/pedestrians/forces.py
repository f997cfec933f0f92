__all__ = ['morse_gradient', 'morse_force', 'morse_forces', 'morse_forces_brute_force']

import numpy as np

from ..pointcloud.neighbors import NeighborTable


def morse_gradient(r: np.ndarray, C_r: float, l_r: float) -> np.ndarray:
    """
    grad U(r) for the repulsive Morse potential U = C_r exp(-|r| / l_r); (n, 2) -> (n, 2).
    Zero at r = 0.
    """
    r = np.atleast_2d(np.asarray(r, dtype=float))
    norm = np.sqrt(r[:, 0] ** 2 + r[:, 1] ** 2)
    scale = np.zeros_like(norm)
    nonzero = norm > 0
    scale[nonzero] = -(C_r / l_r) * np.exp(-norm[nonzero] / l_r) / norm[nonzero]
    return r * scale[:, None]


def morse_force(x_i: np.ndarray, neighbors: np.ndarray, weights: np.ndarray, C_r: float, l_r: float) -> np.ndarray:
    """
    -sum_j grad U(x_i - x_j) rho_j dV_j: repulsion away from the neighbours.

    :param neighbors: (m, 2) neighbour positions (the particle itself may be included, it adds nothing)
    :param weights: rho_j dV_j of each neighbour
    """
    neighbors = np.asarray(neighbors, dtype=float).reshape(-1, 2)
    if len(neighbors) == 0:
        return np.zeros(2)
    grad = morse_gradient(np.asarray(x_i, dtype=float) - neighbors, C_r, l_r)
    return -(grad * np.asarray(weights, dtype=float)[:, None]).sum(axis=0)


def morse_forces(table: NeighborTable, x: np.ndarray, weights: np.ndarray, C_r: float, l_r: float,
                 h: float) -> np.ndarray:
    """``morse_force`` of every particle of the table, pairs up to ``h`` summed in table order."""
    keep = (table.dist <= h) & (table.i != table.j)
    i, j = table.i[keep], table.j[keep]
    grad = morse_gradient(x[i] - x[j], C_r, l_r) * weights[j][:, None]
    force = np.zeros((table.n, 2))
    force[:, 0] = -np.bincount(i, weights=grad[:, 0], minlength=table.n)
    force[:, 1] = -np.bincount(i, weights=grad[:, 1], minlength=table.n)
    return force


def morse_forces_brute_force(x: np.ndarray, weights: np.ndarray, C_r: float, l_r: float,
                             h: float = np.inf) -> np.ndarray:
    """All pairs up to ``h`` (default: no cutoff), particle by particle (test oracle)."""
    forces = []
    for k in range(len(x)):
        near = np.linalg.norm(x - x[k], axis=1) <= h
        near[k] = False
        forces.append(morse_force(x[k], x[near], weights[near], C_r, l_r))
    return np.array(forces).reshape(-1, 2)

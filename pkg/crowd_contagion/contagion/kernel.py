__all__ = ['ContagionKernel', 'infection_rate', 'infection_rates', 'infection_rates_brute_force']

from dataclasses import dataclass

import numpy as np

from ..pointcloud.neighbors import NeighborTable


@dataclass
class ContagionKernel:
    """
    Non-local infection kernel ``i_o * phi_X(|dx|) * phi_V(|du|)``
    with phi_X(r) = exp(-r^4) and phi_V(s) = exp(-s^6), both unnormalised.
    With contact time disabled phi_V is 1: relative speed no longer shortens encounters.
    ``h`` is the cutoff of the spatial sum (phi_X(2.5) ~ 1e-17).
    """
    i_o: float = 0.04
    contact_time_enabled: bool = True
    h: float = 2.5

    @classmethod
    def from_params(cls, params) -> 'ContagionKernel':
        return cls(i_o=params.i_o, contact_time_enabled=params.contact_time_enabled, h=params.h_phi)

    @staticmethod
    def phi_x(r: np.ndarray) -> np.ndarray:
        return np.exp(-np.asarray(r, dtype=float) ** 4)

    def phi_v(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if not self.contact_time_enabled:
            return np.ones_like(s)
        return np.exp(-s ** 6)

    def __call__(self, r: np.ndarray, s: np.ndarray) -> np.ndarray:
        return self.i_o * self.phi_x(r) * self.phi_v(s)


def infection_rate(i: int, neighbors: np.ndarray, x: np.ndarray, u: np.ndarray, alpha_i: np.ndarray,
                   dV: np.ndarray, kernel: ContagionKernel) -> float:
    """
    beta_i = sum_j kernel(|x_i - x_j|, |u_i - u_j|) alpha_I_j dV_j over ``neighbors`` (which include ``i``),
    restricted to the kernel cutoff. ``alpha_i`` is the infected fraction of every particle.
    """
    neighbors = np.asarray(neighbors, dtype=np.int64)
    r = np.linalg.norm(x[neighbors] - x[i], axis=1)
    keep = r <= kernel.h
    j, r = neighbors[keep], r[keep]
    s = np.linalg.norm(u[j] - u[i], axis=1)
    return float(np.sum(kernel(r, s) * alpha_i[j] * dV[j]))


def infection_rates(table: NeighborTable, x: np.ndarray, u: np.ndarray, alpha_i: np.ndarray, dV: np.ndarray,
                    kernel: ContagionKernel) -> np.ndarray:
    """
    ``infection_rate`` of every particle of the table at once.
    Pairs are summed in table order (sorted by i then j) so the result does not depend on the search.
    """
    keep = table.dist <= kernel.h
    i, j, r = table.i[keep], table.j[keep], table.dist[keep]
    carrier = alpha_i[j] * dV[j]
    active = carrier > 0
    i, j, r = i[active], j[active], r[active]
    du = u[i] - u[j]
    s = np.sqrt(du[:, 0] ** 2 + du[:, 1] ** 2)
    return np.bincount(i, weights=kernel(r, s) * alpha_i[j] * dV[j], minlength=table.n)


def infection_rates_brute_force(x: np.ndarray, u: np.ndarray, alpha_i: np.ndarray, dV: np.ndarray,
                                kernel: ContagionKernel) -> np.ndarray:
    """All-pairs sum without cutoff (test oracle)."""
    r = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=2)
    s = np.linalg.norm(u[:, None, :] - u[None, :, :], axis=2)
    return (kernel(r, s) * (alpha_i * dV)[None, :]).sum(axis=1)

__all__ = ['update_volumes', 'interpolate_density']

import numpy as np

from ..errors import DensityError
from .neighbors import query_pairs


def update_volumes(m: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """
    Area carried by each particle, ``dV = m / rho``.
    The mass is constant from seeding, so the volumes follow the density exactly.

    :raises DensityError: a density is zero, negative or not a number
    """
    m = np.asarray(m, dtype=float)
    rho = np.asarray(rho, dtype=float)
    bad = ~(rho > 0)
    if bad.any():
        first = int(np.flatnonzero(bad)[0])
        raise DensityError(f'{int(bad.sum())} particle(s) lost positive density, first index {first} rho={rho[first]}')
    return m / rho


def interpolate_density(points: np.ndarray, positions: np.ndarray, values: np.ndarray, radius: float) -> np.ndarray:
    """
    Inverse-distance weighted average of ``values`` (carried by the particles at ``positions``)
    at each of ``points``, over the particles within ``radius``. 0 where there is none.
    A point sitting on a particle takes that particle's value.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    values = np.asarray(values, dtype=float)
    result = np.zeros(len(points))
    if len(points) == 0 or len(values) == 0:
        return result
    qi, j, dist = query_pairs(points, positions, radius)
    if len(qi) == 0:
        return result
    w = 1. / np.maximum(dist, 1e-12)
    total = np.bincount(qi, weights=w, minlength=len(points))
    weighted = np.bincount(qi, weights=w * values[j], minlength=len(points))
    found = total > 0
    result[found] = weighted[found] / total[found]
    return result

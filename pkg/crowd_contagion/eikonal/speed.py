__all__ = ['speed_field', 'obstacle_speed']

import numpy as np


def speed_field(rho: np.ndarray, params) -> np.ndarray:
    """
    Walking speed V(rho) = V_max (1 - rho / rho_max), floored at ``V_min``
    so the travel cost stays finite in jammed regions.

    >>> speed_field(np.array([0., 5.]), ModelParams())
    array([2., 1.])
    """
    rho = np.asarray(rho, dtype=float)
    return np.maximum(params.V_min, params.V_max * (1. - rho / params.rho_max))


def obstacle_speed(rho: float, params) -> float:
    """Same law with the vehicle's top speed ``V_max_obs``."""
    return float(max(params.V_min, params.V_max_obs * (1. - rho / params.rho_max)))

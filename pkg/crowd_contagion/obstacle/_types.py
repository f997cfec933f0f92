__all__ = ['Obstacle']

from dataclasses import dataclass, field
from typing import (Optional, Tuple)

import numpy as np


@dataclass
class Obstacle:
    """
    A rigid, axis-aligned rectangle.
    Fixed obstacles are geometry only; moving ones follow their own unit-speed eikonal field
    toward ``goal_id`` (see ``step_obstacle``).
    An 8 m x 4 m vehicle driving along x has ``half_extents=(4, 2)``.
    """
    id: str
    center: np.ndarray
    half_extents: Tuple[float, float]
    moving: bool = False
    goal_id: Optional[str] = None
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(2))
    C_r_obs: float = 50.
    l_r_obs: float = 1.
    V_max_obs: float = 3.
    T_obs: float = 0.001
    active: bool = True

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).copy()
        self.velocity = np.asarray(self.velocity, dtype=float).copy()
        self.half_extents = (float(self.half_extents[0]), float(self.half_extents[1]))
        if not self.moving:
            self.velocity = np.zeros(2)

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        """xmin, ymin, xmax, ymax"""
        hx, hy = self.half_extents
        return (self.center[0] - hx, self.center[1] - hy, self.center[0] + hx, self.center[1] + hy)

    @property
    def perimeter(self) -> float:
        return 4 * (self.half_extents[0] + self.half_extents[1])

    @property
    def interaction_radius(self) -> float:
        """Crowd-on-obstacle cutoff: Morse tail beyond ``5 l_r_obs`` plus the body."""
        return 5 * self.l_r_obs + max(self.half_extents)

    def contains(self, points: np.ndarray, strict: bool = True) -> np.ndarray:
        """Boolean mask of the points (n, 2) inside the rectangle."""
        points = np.atleast_2d(points)
        q = np.abs(points - self.center)
        hx, hy = self.half_extents
        if strict:
            return (q[:, 0] < hx) & (q[:, 1] < hy)
        return (q[:, 0] <= hx) & (q[:, 1] <= hy)

    def copy(self) -> 'Obstacle':
        return Obstacle(id=self.id,
                        center=self.center.copy(),
                        half_extents=self.half_extents,
                        moving=self.moving,
                        goal_id=self.goal_id,
                        velocity=self.velocity.copy(),
                        C_r_obs=self.C_r_obs,
                        l_r_obs=self.l_r_obs,
                        V_max_obs=self.V_max_obs,
                        T_obs=self.T_obs,
                        active=self.active)

    def to_dict(self) -> dict:
        data = dict(id=self.id,
                    center=[float(v) for v in self.center],
                    half_extents=list(self.half_extents),
                    moving=bool(self.moving),
                    velocity=[float(v) for v in self.velocity])
        if self.goal_id is not None:
            data['goal'] = self.goal_id
        return data

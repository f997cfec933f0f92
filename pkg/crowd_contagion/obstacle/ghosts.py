__all__ = ['GhostLayer', 'stamp_obstacle_boundary']

import logging
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from ..eikonal.boundary import perimeter_points
from ._types import Obstacle

log = logging.getLogger(__name__)


@dataclass
class GhostLayer:
    """
    Massless nodes along each obstacle outline. They hold ``phi_wall`` in every pedestrian field.
    ``centers`` remembers where each outline was generated.
    """
    spacing: float
    points: Dict[str, np.ndarray] = field(default_factory=dict)
    centers: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def all_points(self) -> np.ndarray:
        if not self.points:
            return np.zeros((0, 2))
        return np.vstack([self.points[key] for key in sorted(self.points)])

    def __len__(self) -> int:
        return sum(len(p) for p in self.points.values())


def stamp_obstacle_boundary(obstacle: Obstacle, layer: GhostLayer) -> GhostLayer:
    """
    (Re)generates the outline of ``obstacle`` in ``layer`` when it is new or has moved by at least one spacing,
    and drops it once the obstacle has left the domain.
    """
    if not obstacle.active:
        if obstacle.id in layer.points:
            del layer.points[obstacle.id]
            del layer.centers[obstacle.id]
            log.info(f'obstacle {obstacle.id} left the domain: ghosts removed')
        return layer
    previous = layer.centers.get(obstacle.id)
    if previous is not None and np.linalg.norm(obstacle.center - previous) < layer.spacing:
        return layer
    layer.points[obstacle.id] = perimeter_points(obstacle.bounds, layer.spacing)
    layer.centers[obstacle.id] = obstacle.center.copy()
    return layer

__all__ = ['SimState', 'Diagnostics']

from dataclasses import dataclass, field
from typing import (Dict, List, Optional)

import numpy as np

from ..eikonal.field import EikonalField
from ..obstacle._types import Obstacle
from ..obstacle.ghosts import GhostLayer
from ..pedestrians.particles import ParticleCloud
from ..pointcloud.neighbors import NeighborTable


@dataclass
class Diagnostics:
    """Running maxima and counters; written to the run metadata."""
    max_simplex_error: float = 0.
    max_mass_error: float = 0.
    eikonal_solves: int = 0
    unreachable_nodes: int = 0
    degenerate_stencils: int = 0
    failed_stencils: int = 0
    fast_particles: int = 0
    exited: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SimState:
    """
    Everything that changes during a run. ``t`` is always ``step * dt``.
    Arrays over particles (``descent``, ``dV``, ``rho_total``) have one row per seeded particle;
    ``neighbors`` indexes the alive particles listed in ``alive_rows``.
    """
    t: float
    step: int
    cloud: ParticleCloud
    obstacles: List[Obstacle]
    ghosts: GhostLayer
    fields: Dict[str, EikonalField] = field(default_factory=dict)
    obstacle_fields: Dict[str, EikonalField] = field(default_factory=dict)
    neighbors: Optional[NeighborTable] = None
    alive_rows: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    descent: Optional[np.ndarray] = None
    dV: Optional[np.ndarray] = None
    rho_total: Optional[np.ndarray] = None
    lsq_radius: Dict[int, float] = field(default_factory=dict)
    solve_centers: Dict[str, np.ndarray] = field(default_factory=dict)
    diagnostics: Diagnostics = field(default_factory=Diagnostics)
    # per-step scratch, valid between phases
    scratch: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.cloud.n
        if self.descent is None:
            self.descent = np.zeros((n, 2))
        if self.dV is None:
            self.dV = np.zeros(n)
        if self.rho_total is None:
            self.rho_total = np.zeros(n)

    @property
    def moving_obstacles(self) -> List[Obstacle]:
        return [o for o in self.obstacles if o.moving and o.active]

    @property
    def active_obstacles(self) -> List[Obstacle]:
        return [o for o in self.obstacles if o.active]

    def obstacle_displacement(self) -> float:
        """Largest distance an obstacle moved since the last eikonal solve."""
        largest = 0.
        for obstacle in self.moving_obstacles:
            center = self.solve_centers.get(obstacle.id)
            if center is not None:
                largest = max(largest, float(np.linalg.norm(obstacle.center - center)))
        return largest

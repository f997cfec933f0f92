__all__ = ['ParticleState', 'ParticleCloud', 'total_density']

from dataclasses import dataclass, field
from typing import (List, Optional, Sequence)

import numpy as np

from ..contagion.fractions import classify_array, SUSCEPTIBLE
from ..pointcloud.volumes import interpolate_density


@dataclass
class ParticleState:
    """
    One Lagrangian grid point: a fluid parcel of pedestrians.
    ``m`` is the constant number of pedestrians it carries (``rho * dV``),
    ``alpha`` the SEIS volume fractions (S, E, I).
    """
    x: np.ndarray
    u: np.ndarray
    rho: float
    m: float
    alpha: np.ndarray
    pop: str
    alive: bool = True
    id: int = 0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        self.alpha = np.asarray(self.alpha, dtype=float)


@dataclass
class ParticleCloud:
    """
    Struct-of-arrays view of all particles, the form the step phases work on.
    Dead particles keep their row (and their last state) so frames have one row per seeded particle;
    every kernel sum works on ``alive_index`` only.
    """
    ids: np.ndarray
    pop: np.ndarray  # population index into ``pop_ids``
    x: np.ndarray
    u: np.ndarray
    rho: np.ndarray
    m: np.ndarray
    alpha: np.ndarray
    alive: np.ndarray
    pop_ids: List[str]
    seeded_susceptible: Optional[np.ndarray] = None
    removed_mass: float = 0.
    initial_mass: float = field(default=0., init=False)

    def __post_init__(self):
        self.initial_mass = float(self.m.sum())

    @classmethod
    def from_states(cls, states: Sequence[ParticleState], pop_ids: Optional[List[str]] = None,
                    exposure_threshold: float = 0.05) -> 'ParticleCloud':
        if pop_ids is None:
            pop_ids = list(dict.fromkeys(s.pop for s in states))
        lookup = {pid: k for k, pid in enumerate(pop_ids)}
        n = len(states)
        alpha = np.array([s.alpha for s in states], dtype=float).reshape(n, 3)
        return cls(ids=np.array([s.id for s in states], dtype=np.int64),
                   pop=np.array([lookup[s.pop] for s in states], dtype=np.int64),
                   x=np.array([s.x for s in states], dtype=float).reshape(n, 2),
                   u=np.array([s.u for s in states], dtype=float).reshape(n, 2),
                   rho=np.array([s.rho for s in states], dtype=float),
                   m=np.array([s.m for s in states], dtype=float),
                   alpha=alpha,
                   alive=np.array([s.alive for s in states], dtype=bool),
                   pop_ids=list(pop_ids),
                   seeded_susceptible=classify_array(alpha, exposure_threshold) == SUSCEPTIBLE)

    def to_states(self) -> List[ParticleState]:
        return [ParticleState(x=self.x[i].copy(), u=self.u[i].copy(), rho=float(self.rho[i]), m=float(self.m[i]),
                              alpha=self.alpha[i].copy(), pop=self.pop_ids[self.pop[i]], alive=bool(self.alive[i]),
                              id=int(self.ids[i]))
                for i in range(self.n)]

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def alive_index(self) -> np.ndarray:
        return np.flatnonzero(self.alive)

    def population_index(self, k: int) -> np.ndarray:
        """Alive rows of population ``k``."""
        return np.flatnonzero(self.alive & (self.pop == k))

    @property
    def alive_mass(self) -> float:
        return float(self.m[self.alive].sum())

    def volumes(self) -> np.ndarray:
        """dV = m / rho for every row (dead rows included, they are never summed)."""
        return self.m / self.rho

    def remove(self, index: np.ndarray) -> float:
        """Marks rows dead and books their mass; returns the removed mass."""
        index = np.asarray(index, dtype=np.int64)
        index = index[self.alive[index]]
        mass = float(self.m[index].sum())
        self.alive[index] = False
        self.removed_mass += mass
        return mass

    def copy(self) -> 'ParticleCloud':
        clone = ParticleCloud(ids=self.ids.copy(), pop=self.pop.copy(), x=self.x.copy(), u=self.u.copy(),
                              rho=self.rho.copy(), m=self.m.copy(), alpha=self.alpha.copy(),
                              alive=self.alive.copy(), pop_ids=list(self.pop_ids),
                              seeded_susceptible=None if self.seeded_susceptible is None
                              else self.seeded_susceptible.copy(),
                              removed_mass=self.removed_mass)
        clone.initial_mass = self.initial_mass
        return clone


def total_density(cloud: ParticleCloud, radius: float) -> np.ndarray:
    """
    Density of all groups at each particle: its own population density ``rho_i``
    plus the density of every other population interpolated at ``x_i``.
    Returns an array over all rows; dead rows get 0.
    """
    rho = np.zeros(cloud.n)
    alive = cloud.alive_index
    rho[alive] = cloud.rho[alive]
    if len(cloud.pop_ids) == 1:
        return rho
    for k in range(len(cloud.pop_ids)):
        own = cloud.population_index(k)
        others = alive[cloud.pop[alive] != k]
        if len(own) == 0 or len(others) == 0:
            continue
        rho[own] += interpolate_density(cloud.x[own], cloud.x[others], cloud.rho[others], radius)
    return rho

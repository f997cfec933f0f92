__all__ = ['seed_particles', 'seed_cloud', 'lattice_points']

import logging
from typing import List

import numpy as np

from ..errors import ScenarioError
from ..pedestrians.particles import ParticleState, ParticleCloud
from ._types import Scenario

log = logging.getLogger(__name__)


def lattice_points(block, spacing: float) -> np.ndarray:
    """
    Centres of the ``spacing``-sized cells that fit whole in ``block`` (xmin, ymin, xmax, ymax),
    counted from its lower-left corner.
    """
    x0, y0, x1, y1 = block
    nx = int(np.floor((x1 - x0) / spacing + 1e-9))
    ny = int(np.floor((y1 - y0) / spacing + 1e-9))
    xs = x0 + (np.arange(nx) + 0.5) * spacing
    ys = y0 + (np.arange(ny) + 0.5) * spacing
    gx, gy = np.meshgrid(xs, ys, indexing='ij')
    return np.column_stack([gx.ravel(), gy.ravel()])


def seed_particles(scenario: Scenario) -> List[ParticleState]:
    """
    Initial particles of every population: at rest, density ``1 / spacing**2``,
    mass ``rho * spacing**2`` (one pedestrian per lattice cell), fractions from the block and its sub-blocks.

    :raises ScenarioError: a seeding block too small for a single cell
    """
    states = []
    for k, population in enumerate(scenario.populations):
        points = lattice_points(population.seeding_block, population.spacing)
        if len(points) == 0:
            raise ScenarioError(f'Seeding block of {population.id} holds no particle at spacing {population.spacing}',
                                field=f'populations[{k}].block')
        rho = 1. / population.spacing ** 2
        m = rho * population.spacing ** 2
        alpha = population.fractions_at(points)
        for point, fractions in zip(points, alpha):
            states.append(ParticleState(x=point, u=np.zeros(2), rho=rho, m=m, alpha=fractions, pop=population.id,
                                        id=len(states)))
        log.debug(f'{population.id}: {len(points)} particles seeded')
    return states


def seed_cloud(scenario: Scenario) -> ParticleCloud:
    """``seed_particles`` as the array form the simulator steps."""
    return ParticleCloud.from_states(seed_particles(scenario),
                                     pop_ids=[p.id for p in scenario.populations],
                                     exposure_threshold=scenario.params.exposure_threshold)

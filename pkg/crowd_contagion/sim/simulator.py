__all__ = ['Simulator', 'run']

import logging
import time
from typing import (Any, Dict, Optional)

from ..contagion.fractions import exposed_percentage
from ..contagion.kernel import ContagionKernel
from ..eikonal.boundary import background_nodes, wall_ghosts, exit_ghosts
from ..errors import SimulationError
from ..obstacle.ghosts import GhostLayer
from ..scenario._types import Scenario
from ..scenario.seeding import seed_cloud
from ._output import SimulatorOutput as _Output
from ._phases import SimulatorPhases as _Phases
from .state import SimState

log = logging.getLogger(__name__)


class Simulator(_Phases, _Output):
    """
    Steps a scenario from its seeded state to ``t_end`` with a fixed time step.

    >>> sim = Simulator(load_preset('corridor_uni'))
    >>> summary = sim.run()

    ``advance()`` steps once without writing anything, for use in tests and notebooks.

    Geometry shared by every eikonal solve is built once here:
    the background lattice and wall ghosts at the smallest population spacing and the exit ghosts of every goal.
    """

    def __init__(self, scenario: Scenario, directory: Optional[str] = None):
        from .. import __version__
        self.version = __version__
        self.scenario = scenario
        self.params = scenario.params
        self.domain = scenario.domain
        self.directory = directory or scenario.output.directory
        self.kernel = ContagionKernel.from_params(self.params)
        self.spacing = scenario.spacing
        self.eikonal_h = 2. * self.spacing
        self.descent_h = 1.5 * self.spacing
        self.interpolation_radius = 2. * self.spacing
        self.background = background_nodes(self.domain.width, self.domain.height, self.spacing)
        self.walls = wall_ghosts(self.domain, self.spacing)
        self.exit_nodes = {region.id: exit_ghosts(self.domain, region.id, self.spacing)
                           for region in self.domain.exit_regions}
        self.population_goals = [population.goal_id for population in scenario.populations]
        self.exits = [self.domain.get_exit(goal) for goal in self.population_goals]
        dt = self.params.dt
        self._frame_every = max(1, int(round(scenario.output.frame_interval / dt)))
        self._trajectory_every = max(1, int(round(scenario.output.trajectory_interval / dt)))
        self.state = SimState(t=0., step=0,
                              cloud=seed_cloud(scenario),
                              obstacles=[obstacle.copy() for obstacle in scenario.obstacles],
                              ghosts=GhostLayer(self.spacing))

    def run(self) -> Dict[str, Any]:
        """
        Advances until ``t_end`` writing the run directory.

        :return: exit summary (final exposed percentage, particles exited and alive, steps, wall-clock seconds)
        :raises SimulationError: after the run directory has been marked as truncated
        """
        self._open_run()
        n_steps = self.params.n_steps
        log.info(f'{self.scenario.name}: {self.state.cloud.n} particles, {n_steps} steps of {self.params.dt} s '
                 f'into {self.directory}')
        tick = time.time()
        state = self.state
        self._record(state)
        try:
            while state.step < n_steps:
                self.advance(state)
                self._record(state)
        except SimulationError as error:
            log.error(f'run aborted at step {error.step} ({error.phase}): {error}')
            self._close_run('truncated', self.exit_summary(time.time() - tick), error)
            raise
        if state.step % self._frame_every != 0:
            self._write_frame(state)
        summary = self.exit_summary(time.time() - tick)
        self._close_run('complete', summary)
        log.info(f'{self.scenario.name} complete: {summary["final_exposed_percent"]:.2f}% exposed, '
                 f'{summary["exited"]} exited in {summary["wall_clock"]:.1f} s')
        return summary

    def exit_summary(self, wall_clock: float = 0.) -> Dict[str, Any]:
        cloud = self.state.cloud
        return dict(final_exposed_percent=exposed_percentage(cloud, self.params.exposure_threshold),
                    exited=self.state.diagnostics.exited,
                    alive=len(cloud.alive_index),
                    steps=self.state.step,
                    t=self.state.t,
                    wall_clock=wall_clock)


def run(scenario: Scenario, directory: Optional[str] = None) -> Dict[str, Any]:
    """Runs a scenario, writing its artifacts into ``directory`` (default: the scenario's output directory)."""
    return Simulator(scenario, directory).run()

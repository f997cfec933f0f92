import glob
import json
import logging
import os
from typing import (Any, Dict, Optional)

import numpy as np

from ..contagion.fractions import exposed_percentage
from ..errors import SimulationError
from ..io_ops.frames import (FrameRecord, write_frame, frame_path, list_frames, write_table, eikonal_table,
                             round_significant)
from ..log import attach_run_log, detach_run_log
from ..pedestrians.particles import total_density
from ..scenario.load import save_scenario
from .state import SimState

log = logging.getLogger(__name__)

SUMMARY_COLUMNS = ['t', 'exposed_percent', 'alive_count', 'mean_density']
OBSTACLE_COLUMNS = ['obstacle_x', 'obstacle_y', 'obstacle_vx', 'obstacle_vy']
TRAJECTORY_COLUMNS = ['t', 'id', 'x', 'y', 'vx', 'vy', 'active']
TRUNCATED = 'TRUNCATED'


class SimulatorOutput:
    """
    Run directory layout::

        scenario.yaml      resolved scenario (re-runs identically)
        frames/frame_NNNNN.csv
        summary.csv        t, exposed_percent, alive_count, mean_density (+ obstacle kinematics)
        exposure.csv       t, percent
        obstacles.csv      t, id, x, y, vx, vy, active (only with obstacles)
        eikonal/           per-frame travel-cost dumps (``dump_eikonal``)
        metadata.json      status, exit summary, diagnostics, version
        run.log
        TRUNCATED          only when the run aborted
    """

    def _open_run(self) -> None:
        directory = self.directory
        os.makedirs(os.path.join(directory, 'frames'), exist_ok=True)
        # a reused directory keeps nothing of the previous run
        stale = [os.path.join(directory, name) for name in (TRUNCATED, 'metadata.json', 'obstacles.csv')]
        stale += list_frames(directory) + glob.glob(os.path.join(directory, 'eikonal', 'eikonal_*.csv'))
        for path in stale:
            if os.path.exists(path):
                os.remove(path)
        if self.scenario.output.dump_eikonal:
            os.makedirs(os.path.join(directory, 'eikonal'), exist_ok=True)
        self._log_handler = attach_run_log(directory)
        save_scenario(self.scenario, os.path.join(directory, 'scenario.yaml'))
        self._summary_rows = []
        self._trajectory_rows = []
        self._frame_index = 0

    def _record(self, state: SimState) -> None:
        if state.step % self._frame_every == 0:
            self._write_frame(state)
        if state.obstacles and state.step % self._trajectory_every == 0:
            t = float(round_significant(state.t))
            for obstacle in state.obstacles:
                self._trajectory_rows.append(dict(t=t, id=obstacle.id,
                                                  x=obstacle.center[0], y=obstacle.center[1],
                                                  vx=obstacle.velocity[0], vy=obstacle.velocity[1],
                                                  active=int(obstacle.active)))

    def _write_frame(self, state: SimState) -> None:
        cloud = state.cloud
        threshold = self.params.exposure_threshold
        record = FrameRecord.from_cloud(cloud, state.t, threshold)
        write_frame(record, frame_path(self.directory, self._frame_index))
        alive = cloud.alive_index
        density = total_density(cloud, self.interpolation_radius)[alive]
        row = dict(t=record.t,
                   exposed_percent=exposed_percentage(cloud, threshold),
                   alive_count=len(alive),
                   mean_density=float(density.mean()) if len(alive) else 0.)
        moving = [o for o in state.obstacles if o.moving]
        if moving:
            vehicle = moving[0]
            row.update(obstacle_x=vehicle.center[0], obstacle_y=vehicle.center[1],
                       obstacle_vx=vehicle.velocity[0], obstacle_vy=vehicle.velocity[1])
        self._summary_rows.append(row)
        if self.scenario.output.dump_eikonal:
            for goal, field in sorted(state.fields.items()):
                path = os.path.join(self.directory, 'eikonal', f'eikonal_{goal}_{self._frame_index:05d}.csv')
                eikonal_table(field).to_csv(path, index=False, float_format='%.12g')
        log.info(f'frame {self._frame_index} t={record.t:g} s: {len(alive)} alive, '
                 f'{row["exposed_percent"]:.2f}% exposed')
        self._frame_index += 1

    def _close_run(self, status: str, summary: Dict[str, Any], error: Optional[SimulationError] = None) -> None:
        directory = self.directory
        columns = SUMMARY_COLUMNS + (OBSTACLE_COLUMNS if any(o.moving for o in self.scenario.obstacles) else [])
        write_table(self._summary_rows, os.path.join(directory, 'summary.csv'), columns)
        write_table([dict(t=row['t'], percent=row['exposed_percent']) for row in self._summary_rows],
                    os.path.join(directory, 'exposure.csv'), ['t', 'percent'])
        if self.scenario.obstacles:
            write_table(self._trajectory_rows, os.path.join(directory, 'obstacles.csv'), TRAJECTORY_COLUMNS)
        metadata = dict(status=status,
                        scenario=self.scenario.name,
                        version=self.version,
                        summary=summary,
                        diagnostics=self.state.diagnostics.to_dict(),
                        params=self.scenario.params.to_dict())
        if error is not None:
            metadata['error'] = dict(message=str(error), step=error.step, phase=error.phase)
            with open(os.path.join(directory, TRUNCATED), 'w') as fh:
                fh.write(f'step {error.step}\nphase {error.phase}\n{error}\n')
        with open(os.path.join(directory, 'metadata.json'), 'w') as fh:
            json.dump(metadata, fh, indent=2, default=_to_builtin)
        detach_run_log(self._log_handler)


def _to_builtin(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f'{type(value)} is not serialisable')
